//! Split-conformal p-values under the null share one calibration set, so
//! they are dependent; their joint law is exact and their correlation is
//! `1/(n+2)`.

use invcorr::models::{conformal_corr, conformal_joint_pmf, conformal_pair_correlation, ConformalSpec, Sampler};
use invcorr::polytope::CorrMatrix;
use invcorr::stats::corr_with_se;
use invcorr::verify::{verify_mc, Mode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ConformalSpec::new(8, 2)?;
    println!("P(P1 = P2 = 3/9) = {}", conformal_joint_pmf(&spec, &[3, 3])?);
    println!("P(P1 = 3/9, P2 = 5/9) = {}", conformal_joint_pmf(&spec, &[3, 5])?);
    for n in [1, 2, 8, 20] {
        println!("n = {n:2}: corr {} (from the pmf: {})", conformal_corr(n), conformal_pair_correlation(n)?);
    }
    let s = spec.sample(100_000, 3);
    let (r, se) = corr_with_se(&s.column(0), &s.column(1)).expect("non-constant");
    println!("Monte-Carlo corr {r:.4} ± {se:.4}");
    let report = verify_mc(&spec, &CorrMatrix::constant(2, 0.1)?, Mode::All, 20, 100_000, 4, 0.01)?;
    println!("invariance under 20 transforms: {:?}", report.verdict);
    Ok(())
}
