//! Dependence concepts on finite models: quadrant dependence, positive
//! regression dependence over increasing sets, the FGM counterexample, and
//! empirical tail dependence.

mod fgm;
mod grid;
mod prd;
mod quadrant;
mod tail;

pub use fgm::{fgm_conditional_derivative, fgm_conditional_upper, fgm_copula};
pub use grid::{discretized_gamma_grid, GridPmf, DEFAULT_MAX_CELLS};
pub use prd::{
    count_upsets, for_each_upset, is_prd, is_prd_capped, is_prd_sampled, Conditioning, PrdReport, PrdWitness,
    DEFAULT_MAX_UPSETS,
};
pub use quadrant::{is_nqd, is_pqd, quadrant_gaps};
pub use tail::{tail_dependence_estimate, TailEstimate, TAIL_MIN_EXPECTED};
