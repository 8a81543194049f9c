use std::ops::{Add, Mul, Sub};

use num_traits::Zero;

use crate::bivariate::JointPmf;

/// `H(x_i, y_j) - F(x_i) G(y_j)` at every grid point, for any exact or
/// floating field. `probs[i][j]` is the mass of the `(i, j)` cell.
pub fn quadrant_gaps<T>(probs: &[Vec<T>]) -> Vec<Vec<T>>
where
    T: Clone + Zero + for<'a> Add<&'a T, Output = T> + Sub<Output = T>,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    let m = probs.len();
    let n = probs.first().map_or(0, Vec::len);
    // Cumulative joint and marginal sums.
    let mut h = vec![vec![T::zero(); n]; m];
    let mut f = vec![T::zero(); m];
    let mut g = vec![T::zero(); n];
    for i in 0..m {
        let mut row = T::zero();
        for j in 0..n {
            row = row + &probs[i][j];
            h[i][j] = if i == 0 { row.clone() } else { h[i - 1][j].clone() + &row };
        }
        f[i] = h[i][n - 1].clone();
    }
    if let Some(last) = h.last() {
        g.clone_from_slice(last);
    }
    (0..m).map(|i| (0..n).map(|j| h[i][j].clone() - &f[i] * &g[j]).collect()).collect()
}

/// Positive quadrant dependence, checked at every atom pair.
pub fn is_pqd(pmf: &JointPmf, tol: f64) -> bool {
    quadrant_gaps(pmf.probs()).iter().flatten().all(|v| *v >= -tol)
}

/// Negative quadrant dependence, checked at every atom pair.
pub fn is_nqd(pmf: &JointPmf, tol: f64) -> bool {
    quadrant_gaps(pmf.probs()).iter().flatten().all(|v| *v <= tol)
}
