//! The invariance oracle: exact checks for finite laws and statistical
//! checks for samplers, over either every admissible transform or the
//! increasing ones only.
//!
//! For a finite support the structural identities are the exhaustive truth;
//! the transform library is an independent cross-check of them. For
//! samplers the library is a heuristic family tested with a
//! Bonferroni-corrected normal approximation.

mod copula_check;
mod exact;
mod mc;
mod report;
mod structural;
mod transforms;

pub use copula_check::{copula_identity_check, CopulaCheck, COPULA_CHECK_ALPHA};
pub use exact::verify_exact;
pub use mc::{verify_mc, INCONCLUSIVE_SKIP_FRACTION, MIN_MC_SAMPLES, SE_METHOD};
pub use report::{InvarianceReport, Method, SkippedTransform, Target, TransformRecord, Verdict};
pub use structural::{structural_classification, StructuralRule, StructuralVerdict};
pub use transforms::{transform_library, Mode, TransformKind, TransformSpec};
