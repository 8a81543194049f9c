//! Correlations that survive every common marginal transform.
//!
//! Finite bivariate laws are classified exactly ([`bivariate`], [`verify`]);
//! multivariate Γ·U models are certified through the clique partition
//! polytope ([`polytope`]) and sampled ([`models`]); [`dependence`] covers
//! quadrant and regression dependence and tail estimates.

// Symmetric-matrix loops read better with explicit indices, and `!(x > 0.0)`
// is how NaN gets rejected alongside nonpositive values.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bivariate;
pub mod cli;
pub mod dependence;
pub mod error;
pub mod lp;
pub mod models;
pub mod partitions;
pub mod polytope;
pub mod stats;
pub mod verify;
