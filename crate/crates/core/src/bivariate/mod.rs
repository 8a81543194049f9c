//! Exact algebra for bivariate laws on finite supports.
//!
//! For a pmf `P` with marginals `p`, `q` on a common grid, the correlation
//! of `(g(X), g(Y))` is a ratio of quadratic forms in `z = g(grid)`. It is
//! invariant in `z` exactly when the symmetric part of `P - p q'` is a
//! multiple of the marginal covariance structure: zero (quasi-independence)
//! or, for identical marginals, `r (D - p p')` (quasi-r-Fréchet).

mod construct;
mod pmf;
pub mod random;
mod structure;

pub use construct::{
    cyclic_remainder, make_quasi_frechet, make_quasi_independent, tri_atomic_eps_range, tri_atomic_quasi_independent,
};
pub use pmf::{JointPmf, DEFAULT_STRUCT_TOL};
pub use structure::{
    correlation, is_quasi_independent, is_quasi_independent_cdf, is_quasi_independent_events, pushforward,
    quasi_frechet_fit, quasi_frechet_fit_detail, quasi_independence_gap, r_bounds, random_rearrangement,
    transform_correlation, transform_correlation_fn, QuasiFrechetFit, RBounds, EVENT_FORM_MAX_GRID,
};
