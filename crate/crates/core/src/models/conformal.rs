use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Sampler;
use crate::error::{Error, Result};

/// Bound on `n + m` for exact pmf evaluation.
pub const CONFORMAL_EXACT_MAX: usize = 30;

/// Largest pmf table the enumerator will build.
const TABLE_MAX_CELLS: usize = 1_000_000;

/// `n` calibration scores and `m` null test scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformalSpec {
    pub n: usize,
    pub m: usize,
}

impl ConformalSpec {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        let spec = Self { n, m };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.n == 0 {
            problems.push("n must be positive".to_string());
        }
        if self.m == 0 {
            problems.push("m must be positive".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    fn validate_exact(&self) -> Result<()> {
        self.validate()?;
        if self.n + self.m > CONFORMAL_EXACT_MAX {
            return Err(Error::Capacity(format!(
                "exact pmf needs n + m <= {CONFORMAL_EXACT_MAX}, got {}",
                self.n + self.m
            )));
        }
        Ok(())
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `P(P_1 = j_1/(n+1), ..., P_m = j_m/(n+1))` for 1-based `indices`:
/// `N_1! ... N_{n+1}! / ((n+m)(n+m-1)...(n+1))`, where `N_j` counts the
/// entries equal to `j`.
pub fn conformal_joint_pmf(spec: &ConformalSpec, indices: &[usize]) -> Result<BigRational> {
    spec.validate_exact()?;
    if indices.len() != spec.m {
        return Err(Error::validation(format!("expected {} indices, got {}", spec.m, indices.len())));
    }
    let mut counts = vec![0usize; spec.n + 1];
    for &j in indices {
        if !(1..=spec.n + 1).contains(&j) {
            return Err(Error::validation(format!("index {j} outside 1..={}", spec.n + 1)));
        }
        counts[j - 1] += 1;
    }
    let num = counts.iter().fold(BigInt::one(), |acc, &c| acc * factorial(c));
    let den = (spec.n + 1..=spec.n + spec.m).fold(BigInt::one(), |acc, k| acc * BigInt::from(k));
    Ok(BigRational::new(num, den))
}

/// An exact rational as decimal strings, so arbitrarily large values survive JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactRational {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for ExactRational {
    fn from(r: &BigRational) -> Self {
        Self { num: r.numer().to_string(), den: r.denom().to_string() }
    }
}

impl TryFrom<&ExactRational> for BigRational {
    type Error = Error;

    fn try_from(e: &ExactRational) -> Result<Self> {
        let parse = |s: &str| s.parse::<BigInt>().map_err(|err| Error::Parse(format!("{s:?}: {err}")));
        let den = parse(&e.den)?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(BigRational::new(parse(&e.num)?, den))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalCell {
    pub indices: Vec<usize>,
    pub prob: ExactRational,
}

fn for_each_tuple(spec: &ConformalSpec, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let k = spec.n + 1;
    let mut idx = vec![1usize; spec.m];
    loop {
        f(&idx)?;
        let mut i = 0;
        while i < spec.m {
            idx[i] += 1;
            if idx[i] <= k {
                break;
            }
            idx[i] = 1;
            i += 1;
        }
        if i == spec.m {
            return Ok(());
        }
    }
}

/// Every index tuple in lexicographic order (last coordinate slowest) with
/// its exact probability.
pub fn conformal_pmf_table(spec: &ConformalSpec) -> Result<Vec<ConformalCell>> {
    spec.validate_exact()?;
    let cells = (spec.n + 1).checked_pow(spec.m as u32);
    if cells.is_none_or(|c| c > TABLE_MAX_CELLS) {
        return Err(Error::Capacity(format!("(n+1)^m exceeds {TABLE_MAX_CELLS} cells")));
    }
    let mut out = Vec::with_capacity(cells.unwrap_or(0));
    for_each_tuple(spec, |idx| {
        let p = conformal_joint_pmf(spec, idx)?;
        out.push(ConformalCell { indices: idx.to_vec(), prob: ExactRational::from(&p) });
        Ok(())
    })?;
    Ok(out)
}

/// The invariant correlation `1/(n+2)` between two null conformal p-values.
pub fn conformal_corr(n: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(n + 2))
}

/// Correlation of `(P_1, P_2)` computed from the exact `m = 2` pmf.
pub fn conformal_pair_correlation(n: usize) -> Result<BigRational> {
    let spec = ConformalSpec::new(n, 2)?;
    let k = BigInt::from(n + 1);
    let val = |j: usize| BigRational::new(BigInt::from(j), k.clone());
    let (mut e1, mut e2, mut e11, mut e22, mut e12) =
        (BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero());
    for_each_tuple(&spec, |idx| {
        let p = conformal_joint_pmf(&spec, idx)?;
        let (a, b) = (val(idx[0]), val(idx[1]));
        e1 += &p * &a;
        e2 += &p * &b;
        e11 += &p * &a * &a;
        e22 += &p * &b * &b;
        e12 += &p * &a * &b;
        Ok(())
    })?;
    let var1 = e11 - &e1 * &e1;
    let var2 = e22 - &e2 * &e2;
    if var1 != var2 {
        return Err(Error::Numerical("conformal marginals differ".into()));
    }
    Ok((e12 - e1 * e2) / var1)
}

impl Sampler for ConformalSpec {
    fn dim(&self) -> usize {
        self.m
    }

    /// Draws `n` calibration and `m` test scores as i.i.d. uniforms.
    fn sample_row(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let calib: Vec<f64> = (0..self.n).map(|_| rng.random()).collect();
        let k = (self.n + 1) as f64;
        for p in out.iter_mut() {
            let s: f64 = rng.random();
            let below = calib.iter().filter(|&&c| c <= s).count();
            *p = (1 + below) as f64 / k;
        }
    }
}
