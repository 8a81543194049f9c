use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Samples;

/// Level of the uniform deviation bound.
pub const COPULA_CHECK_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopulaCheck {
    /// `max |(C(u,v) + C(v,u))/2 - r min(u,v) - (1-r) uv|` over the grid,
    /// with `C` the empirical copula of the first two columns.
    pub max_deviation: f64,
    /// Hoeffding bound with a union over the grid points, at level
    /// [`COPULA_CHECK_ALPHA`].
    pub bound: f64,
    pub passed: bool,
    pub n: usize,
    pub grid_size: usize,
}

/// Checks the symmetrized copula identity on the grid `{1/g, ..., 1}^2`.
pub fn copula_identity_check(samples: &Samples, r: f64, grid_size: usize) -> Result<CopulaCheck> {
    if samples.ncols() < 2 || samples.nrows() == 0 {
        return Err(Error::validation("need bivariate samples"));
    }
    if grid_size == 0 {
        return Err(Error::validation("grid size must be positive"));
    }
    let g = grid_size;
    let gf = g as f64;
    // Smallest grid index a (1-based) with x <= a/g, or g+1 beyond the grid.
    let bin = |x: f64| {
        let mut a = ((x * gf).ceil().max(1.0) as usize).min(g + 1);
        while a > 1 && x <= (a - 1) as f64 / gf {
            a -= 1;
        }
        while a <= g && x > a as f64 / gf {
            a += 1;
        }
        a
    };
    let mut counts = vec![vec![0u64; g + 2]; g + 2];
    for row in samples.rows() {
        counts[bin(row[0])][bin(row[1])] += 1;
    }
    // Cumulative counts: cum[a][b] = #{X <= a/g, Y <= b/g}.
    let mut cum = vec![vec![0u64; g + 1]; g + 1];
    for a in 1..=g {
        for b in 1..=g {
            cum[a][b] = counts[a][b] + cum[a - 1][b] + cum[a][b - 1] - cum[a - 1][b - 1];
        }
    }
    let n = samples.nrows();
    let nf = n as f64;
    let mut max_dev: f64 = 0.0;
    for a in 1..=g {
        for b in 1..=g {
            let (u, v) = (a as f64 / gf, b as f64 / gf);
            let sym = (cum[a][b] + cum[b][a]) as f64 / (2.0 * nf);
            max_dev = max_dev.max((sym - (r * u.min(v) + (1.0 - r) * u * v)).abs());
        }
    }
    let bound = ((2.0 * (g * g) as f64 / COPULA_CHECK_ALPHA).ln() / (2.0 * nf)).sqrt();
    Ok(CopulaCheck { max_deviation: max_dev, bound, passed: max_dev <= bound, n, grid_size: g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Checkerboard, FrechetPair, IndependentUniform, Sampler};

    #[test]
    fn known_copulas() {
        let como = FrechetPair::positive(1.0).unwrap().sample(20_000, 1);
        assert!(copula_identity_check(&como, 1.0, 10).unwrap().passed);
        let half = FrechetPair::positive(0.5).unwrap().sample(20_000, 2);
        assert!(copula_identity_check(&half, 0.5, 10).unwrap().passed);
        let cb = Checkerboard::cyclic(0.08, 0.3).unwrap().sample(20_000, 3);
        assert!(copula_identity_check(&cb, 0.3, 10).unwrap().passed);
        let ind = IndependentUniform(2).sample(20_000, 4);
        assert!(!copula_identity_check(&ind, 0.5, 10).unwrap().passed);
    }
}
