use super::report::{InvarianceReport, Method, SkippedTransform, Target, TransformRecord, Verdict};
use super::structural::structural_classification;
use super::transforms::{transform_library, Mode, TransformKind, TransformSpec};
use crate::bivariate::random::g_values;
use crate::bivariate::{correlation, transform_correlation, JointPmf};
use crate::error::{Error, Result};
use crate::models::row_rng;

const PER_ATOM_SEED_MIX: u64 = 0x2545_f491_4f6c_dd1d;

/// Largest union grid that gets the point-indicator transforms.
const POINT_INDICATOR_MAX_GRID: usize = 64;

/// Affine map of the union grid onto `[0, 1]`.
fn normalized_grid(grid: &[f64]) -> Vec<f64> {
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    if hi > lo {
        grid.iter().map(|x| (x - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; grid.len()]
    }
}

/// Checks `Corr(g(X), g(Y)) = Corr(X, Y)` exactly and reports the
/// structural characterization alongside. The transforms are the library
/// on the normalized grid, `n_transforms` maps with random normal values
/// per atom (sorted in [`Mode::Increasing`]), a half-line indicator at
/// every midpoint, and in [`Mode::All`] the one- and two-point indicators.
pub fn verify_exact(pmf: &JointPmf, mode: Mode, n_transforms: usize, seed: u64, tol: f64) -> Result<InvarianceReport> {
    let base = correlation(pmf)?;
    let t = normalized_grid(pmf.grid());
    let mut library = transform_library(mode, n_transforms, seed);
    if t.len() >= 2 {
        for k in 0..n_transforms {
            let values = g_values(&mut row_rng(seed ^ PER_ATOM_SEED_MIX, k as u64), t.len(), mode == Mode::Increasing);
            let id = library.len();
            library.push(TransformSpec::new(id, TransformKind::PiecewiseLinear { knots: t.clone(), values }));
        }
    }
    for w in t.windows(2) {
        let id = library.len();
        library.push(TransformSpec::new(id, TransformKind::HalfLine { threshold: (w[0] + w[1]) / 2.0 }));
    }
    // Indicators of one or two grid points. These flip the order on one
    // support and not the other, which random transforms can easily miss
    // when the supports interleave.
    if mode == Mode::All && t.len() >= 2 && t.len() <= POINT_INDICATOR_MAX_GRID {
        for k in 0..t.len() {
            for l in k..t.len() {
                let values = (0..t.len()).map(|i| if i == k || i == l { 1.0 } else { 0.0 }).collect();
                let id = library.len();
                library.push(TransformSpec::new(id, TransformKind::PiecewiseLinear { knots: t.clone(), values }));
            }
        }
    }
    let mut report = InvarianceReport {
        mode,
        method: Method::Exact,
        target_r: Target::Scalar(base),
        max_abs_deviation: 0.0,
        verdict: Verdict::Pass,
        failing_ids: Vec::new(),
        records: Vec::new(),
        skipped: Vec::new(),
        structural: None,
        structural_agrees: None,
        n_samples: None,
        alpha: None,
        z: None,
        se_method: None,
    };
    for spec in &library {
        let values: Vec<f64> = t.iter().map(|&x| spec.apply(x)).collect();
        match transform_correlation(pmf, &values) {
            Ok(est) => {
                let deviation = (est - base).abs();
                report.records.push(TransformRecord {
                    id: spec.id,
                    kind: spec.label().into(),
                    pair: None,
                    estimate: est,
                    se: None,
                    deviation,
                    tolerance: tol,
                    passed: deviation <= tol,
                });
            }
            Err(Error::Admissibility(reason)) => {
                report.skipped.push(SkippedTransform { id: spec.id, kind: spec.label().into(), pair: None, reason })
            }
            Err(e) => return Err(e),
        }
    }
    if report.records.is_empty() {
        return Err(Error::Admissibility("every transform is degenerate on this support".into()));
    }
    report.finish();
    report.verdict = if report.failing_ids.is_empty() { Verdict::Pass } else { Verdict::Fail };
    let structural = structural_classification(pmf, mode, tol)?;
    report.structural_agrees = Some(structural.invariant == (report.verdict == Verdict::Pass));
    report.structural = Some(structural);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bivariate::{make_quasi_frechet, random, tri_atomic_quasi_independent};
    use rand::SeedableRng;

    #[test]
    fn quasi_frechet_passes() {
        let s = crate::bivariate::cyclic_remainder(4, 0, 1, 3, 0.02);
        let pmf = make_quasi_frechet(vec![-1.0, 0.5, 2.0, 7.0], &[0.2, 0.3, 0.25, 0.25], 0.3, Some(&s)).unwrap();
        for mode in [Mode::All, Mode::Increasing] {
            let r = verify_exact(&pmf, mode, 30, 1, 1e-12).unwrap();
            assert_eq!(r.verdict, Verdict::Pass);
            assert!(r.max_abs_deviation <= 1e-12);
            assert_eq!(r.structural_agrees, Some(true));
        }
    }

    #[test]
    fn quasi_independent_gives_zero() {
        let pmf = tri_atomic_quasi_independent(&[0.2, 0.3, 0.5], &[0.4, 0.4, 0.2], 0.03).unwrap();
        let r = verify_exact(&pmf, Mode::All, 25, 4, 1e-12).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.records.iter().all(|x| x.estimate.abs() < 1e-12));
    }

    #[test]
    fn different_marginals_fail() {
        // P = p q' + delta a a' with a = (1, 0, -1); cov = 4 delta on atoms 0, 1, 2.
        let (p, q) = ([0.2, 0.3, 0.5], [0.4, 0.4, 0.2]);
        let delta = 0.2 * (0.61f64 * 0.56).sqrt() / 4.0;
        let a = [1.0, 0.0, -1.0];
        let probs = (0..3).map(|i| (0..3).map(|j| p[i] * q[j] + delta * a[i] * a[j]).collect()).collect();
        let pmf = JointPmf::square(vec![0.0, 1.0, 2.0], probs).unwrap();
        assert!((correlation(&pmf).unwrap() - 0.2).abs() < 1e-12);
        for mode in [Mode::All, Mode::Increasing] {
            let r = verify_exact(&pmf, mode, 20, 1, 1e-12).unwrap();
            assert_eq!(r.verdict, Verdict::Fail);
            assert_eq!(r.structural_agrees, Some(true));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let other = random::arbitrary(&mut rng, 3, 4);
        assert_eq!(verify_exact(&other, Mode::Increasing, 20, 1, 1e-12).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn bi_atomic_separates_modes() {
        let pmf = JointPmf::new(vec![0.0, 1.0], vec![0.5, 3.0], vec![vec![0.35, 0.15], vec![0.1, 0.4]]).unwrap();
        let inc = verify_exact(&pmf, Mode::Increasing, 30, 2, 1e-12).unwrap();
        assert_eq!(inc.verdict, Verdict::Pass);
        let all = verify_exact(&pmf, Mode::All, 30, 2, 1e-12).unwrap();
        assert_eq!(all.verdict, Verdict::Fail);
        assert_eq!(all.structural_agrees, Some(true));
    }
}
