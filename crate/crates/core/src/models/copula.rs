use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Sampler;
use crate::error::{Error, Result};

fn check_params(r: f64, s: f64) -> Result<()> {
    if !(r >= 0.0 && s >= 0.0 && r + s <= 1.0 + 1e-15) {
        return Err(Error::validation(format!("need r, s >= 0 and r + s <= 1, got r = {r}, s = {s}")));
    }
    Ok(())
}

/// `r M(u,v) + s W(u,v) + (1 - r - s) uv`.
pub fn frechet_copula_cdf(u: f64, v: f64, r: f64, s: f64) -> Result<f64> {
    check_params(r, s)?;
    if !((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)) {
        return Err(Error::validation(format!("({u}, {v}) outside the unit square")));
    }
    let m = u.min(v);
    let w = (u + v - 1.0).max(0.0);
    Ok(r * m + s * w + (1.0 - r - s) * u * v)
}

/// `r min(F(x), F(y)) + (1 - r) F(x) F(y)`.
pub fn r_frechet_cdf(x: f64, y: f64, f: impl Fn(f64) -> f64, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::validation(format!("r = {r} outside [0, 1]")));
    }
    let (a, b) = (f(x), f(y));
    Ok(r * a.min(b) + (1.0 - r) * a * b)
}

/// Sampler for the Fréchet copula `C_{r,s}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrechetPair {
    pub r: f64,
    pub s: f64,
}

impl FrechetPair {
    pub fn new(r: f64, s: f64) -> Result<Self> {
        check_params(r, s)?;
        Ok(Self { r, s })
    }

    /// The positive Fréchet copula `C_r`.
    pub fn positive(r: f64) -> Result<Self> {
        Self::new(r, 0.0)
    }
}

impl Sampler for FrechetPair {
    fn dim(&self) -> usize {
        2
    }

    fn sample_row(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let pick: f64 = rng.random();
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        out[0] = u;
        out[1] = if pick < self.r {
            u
        } else if pick < self.r + self.s {
            1.0 - u
        } else {
            v
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_examples() {
        assert_eq!(frechet_copula_cdf(0.3, 0.7, 1.0, 0.0).unwrap(), 0.3);
        assert!((frechet_copula_cdf(0.3, 0.7, 0.0, 0.0).unwrap() - 0.21).abs() < 1e-15);
        assert!((frechet_copula_cdf(0.5, 0.5, 0.5, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!(frechet_copula_cdf(0.5, 0.5, 0.7, 0.5).is_err());

        let uniform = |x: f64| x.clamp(0.0, 1.0);
        assert!((r_frechet_cdf(0.4, 0.9, uniform, 0.3).unwrap() - 0.372).abs() < 1e-15);
        assert!((r_frechet_cdf(0.4, 0.9, uniform, 0.0).unwrap() - 0.36).abs() < 1e-15);
        assert_eq!(r_frechet_cdf(0.4, 0.9, uniform, 1.0).unwrap(), 0.4);
        assert!(r_frechet_cdf(0.4, 0.9, uniform, 1.5).is_err());
    }

    #[test]
    fn sampler_mixture_weights() {
        let n = 20_000;
        let s = FrechetPair::new(0.3, 0.2).unwrap().sample(n, 9);
        let same = s.rows().filter(|r| r[0] == r[1]).count() as f64 / n as f64;
        let anti = s.rows().filter(|r| r[0] + r[1] == 1.0).count() as f64 / n as f64;
        assert!((same - 0.3).abs() < 0.015);
        assert!((anti - 0.2).abs() < 0.015);
    }
}
