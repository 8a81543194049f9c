use serde::{Deserialize, Serialize};

use super::pmf::JointPmf;
use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-12;

/// Pearson correlation of `(g(X), g(Y))`, where `g` is given by its value at
/// each point of the union grid (`pmf.grid()`).
pub fn transform_correlation(pmf: &JointPmf, g_values: &[f64]) -> Result<f64> {
    let grid = pmf.grid();
    if g_values.len() != grid.len() {
        return Err(Error::validation(format!(
            "transform has {} values for a grid of {} atoms",
            g_values.len(),
            grid.len()
        )));
    }
    if g_values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Admissibility("transform takes a non-finite value".into()));
    }
    let zx: Vec<f64> = pmf.x_grid_index().iter().map(|&a| g_values[a]).collect();
    let zy: Vec<f64> = pmf.y_grid_index().iter().map(|&b| g_values[b]).collect();
    if zx.iter().all(|&v| v == zx[0]) {
        return Err(Error::Admissibility("transform is constant on the support of X".into()));
    }
    if zy.iter().all(|&v| v == zy[0]) {
        return Err(Error::Admissibility("transform is constant on the support of Y".into()));
    }
    let mx: f64 = pmf.p().iter().zip(&zx).map(|(p, z)| p * z).sum();
    let my: f64 = pmf.q().iter().zip(&zy).map(|(q, z)| q * z).sum();
    let cx: Vec<f64> = zx.iter().map(|z| z - mx).collect();
    let cy: Vec<f64> = zy.iter().map(|z| z - my).collect();
    let vx: f64 = pmf.p().iter().zip(&cx).map(|(p, c)| p * c * c).sum();
    let vy: f64 = pmf.q().iter().zip(&cy).map(|(q, c)| q * c * c).sum();
    if !(vx > 0.0 && vy > 0.0) {
        return Err(Error::Admissibility("transformed variance vanishes".into()));
    }
    let cov: f64 =
        pmf.probs().iter().zip(&cx).map(|(row, a)| a * row.iter().zip(&cy).map(|(p, b)| p * b).sum::<f64>()).sum();
    Ok((cov / (vx * vy).sqrt()).clamp(-1.0, 1.0))
}

/// Same as [`transform_correlation`] with `g` given as a function.
pub fn transform_correlation_fn(pmf: &JointPmf, g: impl Fn(f64) -> f64) -> Result<f64> {
    let values: Vec<f64> = pmf.grid().iter().map(|&x| g(x)).collect();
    transform_correlation(pmf, &values)
}

/// Pearson correlation of `(X, Y)`.
pub fn correlation(pmf: &JointPmf) -> Result<f64> {
    if pmf.x_support_size() < 2 || pmf.y_support_size() < 2 {
        return Err(Error::Admissibility("a marginal is degenerate".into()));
    }
    transform_correlation(pmf, pmf.grid())
}

/// Matrix form of quasi-independence on the union grid:
/// `P + P' = p q' + q p'` entrywise within `tol`.
pub fn is_quasi_independent(pmf: &JointPmf, tol: f64) -> bool {
    quasi_independence_gap(pmf) <= tol
}

/// Largest entrywise violation of `P + P' = p q' + q p'`.
pub fn quasi_independence_gap(pmf: &JointPmf) -> f64 {
    let g = pmf.grid_probs();
    let p = pmf.grid_p();
    let q = pmf.grid_q();
    let n = g.len();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            let lhs = g[a][b] + g[b][a];
            let rhs = p[a] * q[b] + p[b] * q[a];
            worst = worst.max((lhs - rhs).abs());
        }
    }
    worst
}

/// CDF form: `H(x,y) + H(y,x) = F(x)G(y) + F(y)G(x)` at every grid point.
pub fn is_quasi_independent_cdf(pmf: &JointPmf, tol: f64) -> bool {
    let g = pmf.grid_probs();
    let n = g.len();
    // cum[a][b] = P(X <= grid[a], Y <= grid[b])
    let mut cum = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut v = g[a][b];
            if a > 0 {
                v += cum[a - 1][b];
            }
            if b > 0 {
                v += cum[a][b - 1];
            }
            if a > 0 && b > 0 {
                v -= cum[a - 1][b - 1];
            }
            cum[a][b] = v;
        }
    }
    let f: Vec<f64> = (0..n).map(|a| cum[a][n - 1]).collect();
    let gy: Vec<f64> = (0..n).map(|b| cum[n - 1][b]).collect();
    (0..n).all(|a| {
        (0..n).all(|b| {
            let lhs = cum[a][b] + cum[b][a];
            let rhs = f[a] * gy[b] + f[b] * gy[a];
            (lhs - rhs).abs() <= tol
        })
    })
}

/// Largest grid for which [`is_quasi_independent_events`] enumerates subsets.
pub const EVENT_FORM_MAX_GRID: usize = 10;

/// Event form: for every pair of atom subsets `A, B`,
/// `P(X∈A,Y∈B) + P(X∈B,Y∈A) = P(X∈A)P(Y∈B) + P(X∈B)P(Y∈A)`.
pub fn is_quasi_independent_events(pmf: &JointPmf, tol: f64) -> Result<bool> {
    let g = pmf.grid_probs();
    let n = g.len();
    if n > EVENT_FORM_MAX_GRID {
        return Err(Error::Capacity(format!(
            "event form enumerates 4^{n} subset pairs; grid limit is {EVENT_FORM_MAX_GRID}"
        )));
    }
    let p = pmf.grid_p();
    let q = pmf.grid_q();
    let mass = |v: &[f64], set: usize| -> f64 { (0..n).filter(|k| set >> k & 1 == 1).map(|k| v[k]).sum() };
    let joint = |sa: usize, sb: usize| -> f64 {
        let mut s = 0.0;
        for a in (0..n).filter(|k| sa >> k & 1 == 1) {
            for b in (0..n).filter(|k| sb >> k & 1 == 1) {
                s += g[a][b];
            }
        }
        s
    };
    for sa in 0..1usize << n {
        for sb in sa..1usize << n {
            let lhs = joint(sa, sb) + joint(sb, sa);
            let rhs = mass(&p, sa) * mass(&q, sb) + mass(&p, sb) * mass(&q, sa);
            if (lhs - rhs).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Admissible range `[lower, 1]` of an invariant correlation for marginal `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RBounds {
    pub lower: f64,
    pub upper: f64,
}

impl RBounds {
    pub fn contains(&self, r: f64, tol: f64) -> bool {
        r >= self.lower - tol && r <= self.upper + tol
    }
}

pub(crate) fn validate_prob_vector(name: &str, p: &[f64]) -> Result<()> {
    if p.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::validation(format!("{name} must be strictly positive")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::validation(format!("{name} sums to {total}, not 1")));
    }
    Ok(())
}

pub fn r_bounds(p: &[f64]) -> Result<RBounds> {
    if p.len() < 2 {
        return Err(Error::validation("probability vector needs at least two atoms"));
    }
    validate_prob_vector("p", p)?;
    let single = p.iter().map(|&pj| -pj / (1.0 - pj)).fold(f64::NEG_INFINITY, f64::max);
    let mut pair = f64::NEG_INFINITY;
    for (i, &pi) in p.iter().enumerate() {
        for (j, &pj) in p.iter().enumerate() {
            if i != j {
                pair = pair.max(1.0 - 1.0 / (pi * pj));
            }
        }
    }
    Ok(RBounds { lower: single.max(pair), upper: 1.0 })
}

/// Least-squares fit of `(P + P')/2 - p p' = r (D - p p')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiFrechetFit {
    pub r: f64,
    /// Frobenius norm of the fitted identity's residual.
    pub residual: f64,
    pub bounds: RBounds,
}

pub fn quasi_frechet_fit_detail(pmf: &JointPmf) -> Result<QuasiFrechetFit> {
    if !pmf.identical_marginals() {
        return Err(Error::Structure("quasi-Fréchet structure needs identical marginals".into()));
    }
    let p = pmf.p();
    let bounds = r_bounds(p)?;
    let probs = pmf.probs();
    let n = p.len();
    let (mut ab, mut bb) = (0.0, 0.0);
    let mut a_mat = vec![vec![0.0; n]; n];
    let mut b_mat = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let a = 0.5 * (probs[i][j] + probs[j][i]) - p[i] * p[j];
            let b = if i == j { p[i] } else { 0.0 } - p[i] * p[j];
            ab += a * b;
            bb += b * b;
            a_mat[i][j] = a;
            b_mat[i][j] = b;
        }
    }
    let r = ab / bb;
    let residual =
        a_mat.iter().flatten().zip(b_mat.iter().flatten()).map(|(a, b)| (a - r * b).powi(2)).sum::<f64>().sqrt();
    Ok(QuasiFrechetFit { r, residual, bounds })
}

/// The invariant correlation `r` if the pmf is quasi-`r`-Fréchet within `tol`.
pub fn quasi_frechet_fit(pmf: &JointPmf, tol: f64) -> Result<Option<f64>> {
    let fit = quasi_frechet_fit_detail(pmf)?;
    Ok((fit.residual <= tol && fit.bounds.contains(fit.r, tol)).then_some(fit.r))
}

/// Law of the random rearrangement: `(P + P')/2` on the union grid.
pub fn random_rearrangement(pmf: &JointPmf) -> JointPmf {
    let g = pmf.grid_probs();
    let n = g.len();
    let probs = (0..n).map(|a| (0..n).map(|b| 0.5 * (g[a][b] + g[b][a])).collect()).collect();
    JointPmf::square(pmf.grid().to_vec(), probs).expect("rearrangement of a valid pmf is valid")
}

/// Law of `(h(X), h(Y))`, with `h` given on the union grid. Atoms with equal
/// images merge.
pub fn pushforward(pmf: &JointPmf, h_values: &[f64]) -> Result<JointPmf> {
    if h_values.len() != pmf.grid().len() {
        return Err(Error::validation("map must give one value per grid atom"));
    }
    if h_values.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("map takes a non-finite value"));
    }
    let image = |idx: &[usize]| -> Vec<f64> {
        let mut v: Vec<f64> = idx.iter().map(|&a| h_values[a]).collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        v.dedup();
        v
    };
    let xs = image(pmf.x_grid_index());
    let ys = image(pmf.y_grid_index());
    let pos = |atoms: &[f64], v: f64| atoms.iter().position(|&a| a == v).expect("image atom");
    let mut probs = vec![vec![0.0; ys.len()]; xs.len()];
    for (i, row) in pmf.probs().iter().enumerate() {
        let a = pos(&xs, h_values[pmf.x_grid_index()[i]]);
        for (j, v) in row.iter().enumerate() {
            let b = pos(&ys, h_values[pmf.y_grid_index()[j]]);
            probs[a][b] += v;
        }
    }
    JointPmf::new(xs, ys, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bivariate::construct::{make_quasi_frechet, tri_atomic_quasi_independent};

    fn uniform3() -> Vec<f64> {
        vec![1.0 / 3.0; 3]
    }

    #[test]
    fn independence_has_zero_correlation() {
        let pmf = JointPmf::independent(vec![1.0, 2.0, 5.0], &[0.2, 0.3, 0.5], vec![0.0, 1.0], &[0.6, 0.4]).unwrap();
        assert!(correlation(&pmf).unwrap().abs() < 1e-15);
        assert!(is_quasi_independent(&pmf, 1e-12));
    }

    #[test]
    fn comonotone_has_unit_correlation() {
        let p = [0.2, 0.3, 0.5];
        let probs = (0..3).map(|i| (0..3).map(|j| if i == j { p[i] } else { 0.0 }).collect()).collect();
        let pmf = JointPmf::square(vec![1.0, 2.0, 3.0], probs).unwrap();
        assert!((correlation(&pmf).unwrap() - 1.0).abs() < 1e-15);
    }

    /// Oracle: correlation straight from the quadratic-form formula with identical marginals.
    fn quadratic_form_corr(x: &[f64], p: &[f64], probs: &[Vec<f64>]) -> f64 {
        let n = x.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            for j in 0..n {
                let pp = p[i] * p[j];
                num += x[i] * (probs[i][j] - pp) * x[j];
                den += x[i] * (if i == j { p[i] } else { 0.0 } - pp) * x[j];
            }
        }
        num / den
    }

    #[test]
    fn frechet_correlation_matches_quadratic_form() {
        let x = vec![1.0, 2.0, 3.0];
        let p = uniform3();
        let pmf = make_quasi_frechet(x.clone(), &p, 0.3, None).unwrap();
        let oracle = quadratic_form_corr(&x, &p, pmf.probs());
        assert!((oracle - 0.3).abs() < 1e-14);
        assert!((correlation(&pmf).unwrap() - oracle).abs() < 1e-14);
    }

    #[test]
    fn top_atom_indicator_on_frechet() {
        let pmf = make_quasi_frechet(vec![1.0, 2.0, 3.0], &uniform3(), 0.3, None).unwrap();
        let c = transform_correlation(&pmf, &[0.0, 0.0, 1.0]).unwrap();
        assert!((c - 0.3).abs() < 1e-14);
    }

    #[test]
    fn degenerate_transforms_rejected() {
        let pmf = make_quasi_frechet(vec![1.0, 2.0, 3.0], &uniform3(), 0.3, None).unwrap();
        assert!(matches!(transform_correlation(&pmf, &[1.0, 1.0, 1.0]), Err(Error::Admissibility(_))));
        // Constant on Y's support only.
        let pmf = JointPmf::independent(vec![0.0, 1.0, 2.0], &uniform3(), vec![1.0, 2.0], &[0.5, 0.5]).unwrap();
        assert!(matches!(transform_correlation(&pmf, &[0.0, 5.0, 5.0]), Err(Error::Admissibility(_))));
        let single = JointPmf::new(vec![1.0], vec![1.0, 2.0], vec![vec![0.5, 0.5]]).unwrap();
        assert!(correlation(&single).is_err());
    }

    #[test]
    fn example_tri_atomic_is_quasi_independent() {
        let pmf = tri_atomic_quasi_independent(&uniform3(), &uniform3(), 1.0 / 9.0).unwrap();
        assert!(is_quasi_independent(&pmf, 1e-12));
        assert!(is_quasi_independent_cdf(&pmf, 1e-12));
        assert!(is_quasi_independent_events(&pmf, 1e-12).unwrap());
        assert_eq!(quasi_frechet_fit(&pmf, 1e-12).unwrap().map(|r| (r * 1e12).round()), Some(0.0));
    }

    #[test]
    fn symmetric_positive_dependence_is_not_quasi_independent() {
        let pmf = make_quasi_frechet(vec![1.0, 2.0, 3.0], &uniform3(), 0.5, None).unwrap();
        assert!(!is_quasi_independent(&pmf, 1e-12));
    }

    #[test]
    fn frechet_fit_recovers_r() {
        let pmf = make_quasi_frechet(vec![1.0, 2.0, 3.0], &uniform3(), 0.3, None).unwrap();
        let r = quasi_frechet_fit(&pmf, 1e-12).unwrap().unwrap();
        assert!((r - 0.3).abs() < 1e-14);
        let indep = JointPmf::independent(vec![1.0, 2.0], &[0.4, 0.6], vec![1.0, 2.0], &[0.4, 0.6]).unwrap();
        assert!(quasi_frechet_fit(&indep, 1e-12).unwrap().unwrap().abs() < 1e-14);
        let other = JointPmf::independent(vec![1.0, 2.0], &[0.4, 0.6], vec![1.0, 3.0], &[0.4, 0.6]).unwrap();
        assert!(matches!(quasi_frechet_fit(&other, 1e-12), Err(Error::Structure(_))));
    }

    #[test]
    fn bounds_examples() {
        assert!((r_bounds(&uniform3()).unwrap().lower + 0.5).abs() < 1e-15);
        assert_eq!(r_bounds(&[0.5, 0.5]).unwrap().lower, -1.0);
        // Oracle: evaluate both inner maxima by hand.
        let p = [0.9, 0.05, 0.05];
        let single = [-0.9 / 0.1, -0.05 / 0.95, -0.05 / 0.95];
        let pair = [1.0 - 1.0 / (0.9 * 0.05), 1.0 - 1.0 / (0.05 * 0.05)];
        let expected = single.iter().chain(&pair).copied().fold(f64::NEG_INFINITY, f64::max);
        let b = r_bounds(&p).unwrap();
        assert!((b.lower - expected).abs() < 1e-15);
        assert!((b.lower + 1.0 / 19.0).abs() < 1e-15);
        assert_eq!(b.upper, 1.0);
        assert!(r_bounds(&[1.0]).is_err());
        assert!(r_bounds(&[0.5, 0.6]).is_err());
        assert!(r_bounds(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn rearrangement_examples() {
        let pmf = tri_atomic_quasi_independent(&uniform3(), &uniform3(), 1.0 / 9.0).unwrap();
        let rr = random_rearrangement(&pmf);
        for row in rr.probs() {
            for v in row {
                assert!((v - 1.0 / 9.0).abs() < 1e-15);
            }
        }
        let sym = make_quasi_frechet(vec![1.0, 2.0, 3.0], &uniform3(), 0.3, None).unwrap();
        assert_eq!(random_rearrangement(&sym).probs(), sym.probs());
    }

    #[test]
    fn pushforward_merges_atoms() {
        let pmf = make_quasi_frechet(vec![1.0, 2.0, 3.0], &uniform3(), 0.3, None).unwrap();
        let merged = pushforward(&pmf, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(merged.x_atoms(), &[0.0, 1.0]);
        assert!((merged.p()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((quasi_frechet_fit(&merged, 1e-12).unwrap().unwrap() - 0.3).abs() < 1e-13);
    }
}
