use super::report::{InvarianceReport, Method, SkippedTransform, Target, TransformRecord, Verdict};
use super::transforms::{transform_library, Mode};
use crate::error::{Error, Result};
use crate::models::Sampler;
use crate::polytope::CorrMatrix;
use crate::stats::{bonferroni_z, corr_with_se};

/// Smallest sample size accepted by [`verify_mc`].
pub const MIN_MC_SAMPLES: usize = 10_000;

/// Above this fraction of skipped tests the verdict is inconclusive.
pub const INCONCLUSIVE_SKIP_FRACTION: f64 = 0.5;

/// The transform library for Monte-Carlo runs draws from a stream family
/// distinct from the sample rows.
const LIBRARY_SEED_MIX: u64 = 0x9e37_79b9_7f4a_7c15;

pub const SE_METHOD: &str = "delta-method asymptotic SE of Pearson r (distribution-free fourth moments), \
two-sided Bonferroni over all transform-pair tests";

/// Estimates `Corr(g(X_i), g(X_j))` for every library transform and pair
/// and tests each against `target[i][j]`. Transforms act on the samples
/// after the pooled affine map onto `[0, 1]`.
pub fn verify_mc(
    sampler: &dyn Sampler,
    target: &CorrMatrix,
    mode: Mode,
    n_transforms: usize,
    n_samples: usize,
    seed: u64,
    alpha: f64,
) -> Result<InvarianceReport> {
    let d = sampler.dim();
    if target.d() != d {
        return Err(Error::validation(format!("target is {}x{0}, sampler has dimension {d}", target.d())));
    }
    if d < 2 {
        return Err(Error::Dimension { d, min: 2, max: usize::MAX });
    }
    if n_samples < MIN_MC_SAMPLES {
        return Err(Error::validation(format!("need at least {MIN_MC_SAMPLES} samples, got {n_samples}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::validation(format!("alpha = {alpha} outside (0, 1)")));
    }
    if n_transforms == 0 {
        return Err(Error::validation("need at least one transform"));
    }
    let samples = sampler.sample(n_samples, seed);
    let (lo, hi) = samples.rows().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let cols: Vec<Vec<f64>> = (0..d).map(|j| samples.column(j).iter().map(|v| (v - lo) / span).collect()).collect();

    let library = transform_library(mode, n_transforms, seed ^ LIBRARY_SEED_MIX);
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let tests = library.len() * pairs.len();
    let z = bonferroni_z(alpha, tests);
    let mut report = InvarianceReport {
        mode,
        method: Method::MonteCarlo,
        target_r: Target::Matrix(target.rows().to_vec()),
        max_abs_deviation: 0.0,
        verdict: Verdict::Pass,
        failing_ids: Vec::new(),
        records: Vec::new(),
        skipped: Vec::new(),
        structural: None,
        structural_agrees: None,
        n_samples: Some(n_samples),
        alpha: Some(alpha),
        z: Some(z),
        se_method: Some(SE_METHOD.into()),
    };
    for spec in &library {
        let g: Vec<Vec<f64>> = cols.iter().map(|c| c.iter().map(|&t| spec.apply(t)).collect()).collect();
        for &(i, j) in &pairs {
            let pair = Some([i + 1, j + 1]);
            match corr_with_se(&g[i], &g[j]) {
                Some((est, se)) => {
                    let deviation = (est - target.get(i, j)).abs();
                    let tolerance = z * se + 1e-12;
                    report.records.push(TransformRecord {
                        id: spec.id,
                        kind: spec.label().into(),
                        pair,
                        estimate: est,
                        se: Some(se),
                        deviation,
                        tolerance,
                        passed: deviation <= tolerance,
                    });
                }
                None => report.skipped.push(SkippedTransform {
                    id: spec.id,
                    kind: spec.label().into(),
                    pair,
                    reason: "transformed sample is constant".into(),
                }),
            }
        }
    }
    report.finish();
    report.verdict = if !report.failing_ids.is_empty() {
        Verdict::Fail
    } else if report.records.is_empty() || report.skipped.len() as f64 > INCONCLUSIVE_SKIP_FRACTION * tests as f64 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{FrechetPair, IndependentUniform};

    #[test]
    fn frechet_passes_and_misspecified_fails() {
        let f = FrechetPair::positive(0.4).unwrap();
        let r = verify_mc(&f, &CorrMatrix::constant(2, 0.4).unwrap(), Mode::All, 12, 20_000, 3, 0.01).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.failing_ids);
        let r = verify_mc(&f, &CorrMatrix::constant(2, 0.5).unwrap(), Mode::All, 12, 20_000, 3, 0.01).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn input_checks() {
        let s = IndependentUniform(3);
        assert!(verify_mc(&s, &CorrMatrix::identity(2), Mode::All, 5, 20_000, 1, 0.01).is_err());
        assert!(verify_mc(&s, &CorrMatrix::identity(3), Mode::All, 5, 100, 1, 0.01).is_err());
    }
}
