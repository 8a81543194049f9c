//! Small sample statistics used by the Monte-Carlo checks.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::models::Samples;

/// Critical value of the one-sample KS statistic at level 0.01, scaled by `sqrt(n)`.
pub const KS_CRIT_01: f64 = 1.63;

/// Pearson correlation; `None` when either input is constant.
pub fn correlation(x: &[f64], y: &[f64]) -> Option<f64> {
    corr_with_se(x, y).map(|c| c.0)
}

/// Pearson correlation and its distribution-free asymptotic standard error
/// (delta method on the standardized fourth moments). Unlike
/// `(1 - r^2)/sqrt(n)`, this stays calibrated for non-normal data.
pub fn corr_with_se(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    assert_eq!(n, y.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (a, b) = (a - mx, b - my);
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    let scale = 1e-13 * (mx.abs() + my.abs() + 1.0);
    if sxx / nf <= scale * scale || syy / nf <= scale * scale {
        return None;
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let (sx, sy) = ((sxx / nf).sqrt(), (syy / nf).sqrt());
    let (mut m22, mut m31, mut m13, mut m40, mut m04) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (a, b) = ((a - mx) / sx, (b - my) / sy);
        let (a2, b2) = (a * a, b * b);
        m22 += a2 * b2;
        m31 += a2 * a * b;
        m13 += a * b2 * b;
        m40 += a2 * a2;
        m04 += b2 * b2;
    }
    let (m22, m31, m13, m40, m04) = (m22 / nf, m31 / nf, m13 / nf, m40 / nf, m04 / nf);
    let v = m22 - r * (m31 + m13) + r * r / 4.0 * (m40 + m04 + 2.0 * m22);
    Some((r, (v.max(0.0) / nf).sqrt()))
}

/// Pairwise correlation matrix of the columns; `NaN` where a column is constant.
pub fn correlation_matrix(s: &Samples) -> Vec<Vec<f64>> {
    let d = s.ncols();
    let cols: Vec<Vec<f64>> = (0..d).map(|j| s.column(j)).collect();
    let mut out = vec![vec![1.0; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let r = correlation(&cols[i], &cols[j]).unwrap_or(f64::NAN);
            out[i][j] = r;
            out[j][i] = r;
        }
    }
    out
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Two-sided Bonferroni critical value for `tests` simultaneous tests at level `alpha`.
pub fn bonferroni_z(alpha: f64, tests: usize) -> f64 {
    normal_quantile(1.0 - alpha / (2.0 * tests.max(1) as f64))
}

/// One-sample Kolmogorov–Smirnov statistic against the standard uniform.
pub fn ks_uniform(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &u)| {
            let u = u.clamp(0.0, 1.0);
            ((i + 1) as f64 / n - u).max(u - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Pearson chi-square goodness of fit; returns `(statistic, p-value)`.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> (f64, f64) {
    assert_eq!(counts.len(), probs.len());
    let n: u64 = counts.iter().sum();
    let stat: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = n as f64 * p;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let df = (counts.len() - 1) as f64;
    let p = ChiSquared::new(df).map_or(f64::NAN, |d| 1.0 - d.cdf(stat));
    (stat, p)
}
