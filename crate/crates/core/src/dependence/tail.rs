use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Samples;

/// Minimum expected tail count `u * n` for a stable estimate.
pub const TAIL_MIN_EXPECTED: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    /// `#{X_1 <= u, X_2 <= u} / (n u)`.
    pub lambda: f64,
    pub joint_count: u64,
    pub n: u64,
    /// Binomial standard error of `lambda`.
    pub se: f64,
    /// False when `u * n` is below [`TAIL_MIN_EXPECTED`].
    pub stable: bool,
}

/// Empirical lower tail dependence at threshold `u` for the first two
/// columns of samples already on uniform margins.
pub fn tail_dependence_estimate(samples: &Samples, u: f64) -> Result<TailEstimate> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::validation(format!("threshold {u} outside (0, 1)")));
    }
    if samples.ncols() < 2 {
        return Err(Error::validation("need bivariate samples"));
    }
    let n = samples.nrows() as u64;
    if n == 0 {
        return Err(Error::validation("no samples"));
    }
    let joint = samples.rows().filter(|r| r[0] <= u && r[1] <= u).count() as u64;
    let nf = n as f64;
    let p = joint as f64 / nf;
    Ok(TailEstimate {
        lambda: p / u,
        joint_count: joint,
        n,
        se: (p * (1.0 - p) / nf).sqrt() / u,
        stable: u * nf >= TAIL_MIN_EXPECTED,
    })
}
