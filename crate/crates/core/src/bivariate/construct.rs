use super::pmf::JointPmf;
use super::structure::{r_bounds, validate_prob_vector};
use crate::error::{Error, Result};

const SHAPE_TOL: f64 = 1e-12;

fn construction(e: Error) -> Error {
    match e {
        Error::Validation(v) => Error::Construction(v.join("; ")),
        other => other,
    }
}

/// Checks that `s` is `n x n`, antisymmetric, and has zero row sums
/// (column sums then vanish too).
fn check_remainder(s: &[Vec<f64>], n: usize) -> Result<()> {
    if s.len() != n || s.iter().any(|r| r.len() != n) {
        return Err(Error::Construction(format!("remainder must be {n}x{n}")));
    }
    for i in 0..n {
        for j in i..n {
            if (s[i][j] + s[j][i]).abs() > SHAPE_TOL {
                return Err(Error::Construction(format!("remainder is not antisymmetric at ({}, {})", i + 1, j + 1)));
            }
        }
        let row: f64 = s[i].iter().sum();
        if row.abs() > SHAPE_TOL {
            return Err(Error::Construction(format!("remainder row {} sums to {row}", i + 1)));
        }
    }
    Ok(())
}

fn nonnegative(value: f64, i: usize, j: usize) -> Result<f64> {
    if value < -SHAPE_TOL {
        return Err(Error::Construction(format!("entry ({}, {}) would be negative ({value})", i + 1, j + 1)));
    }
    Ok(value.max(0.0))
}

/// `P = p q' + S` on the union grid of the two atom sets.
///
/// `s` is indexed by the union grid. It must be antisymmetric with zero row
/// and column sums, keep every entry nonnegative, and vanish wherever the
/// product support excludes a cell.
pub fn make_quasi_independent(
    x_atoms: Vec<f64>,
    p: &[f64],
    y_atoms: Vec<f64>,
    q: &[f64],
    s: &[Vec<f64>],
) -> Result<JointPmf> {
    if p.len() != x_atoms.len() || q.len() != y_atoms.len() {
        return Err(Error::Construction("marginal lengths must match atom counts".into()));
    }
    validate_prob_vector("p", p).map_err(construction)?;
    validate_prob_vector("q", q).map_err(construction)?;
    let base = JointPmf::independent(x_atoms, p, y_atoms, q).map_err(construction)?;
    let n = base.grid().len();
    check_remainder(s, n)?;
    let xi = base.x_grid_index();
    let yi = base.y_grid_index();
    for a in 0..n {
        for b in 0..n {
            let allowed = xi.contains(&a) && yi.contains(&b);
            if !allowed && s[a][b].abs() > SHAPE_TOL {
                return Err(Error::Construction(format!(
                    "remainder is nonzero at ({}, {}) outside the product support",
                    a + 1,
                    b + 1
                )));
            }
        }
    }
    let mut probs = base.probs().to_vec();
    for (i, row) in probs.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = nonnegative(*v + s[xi[i]][yi[j]], i, j)?;
        }
    }
    JointPmf::new(base.x_atoms().to_vec(), base.y_atoms().to_vec(), probs).map_err(construction)
}

/// The tri-atomic quasi-independent family on atoms `1, 2, 3`:
/// `P = p q' + S` with `s12 = s23 = s31 = eps` and `S' = -S`.
pub fn tri_atomic_quasi_independent(p: &[f64], q: &[f64], eps: f64) -> Result<JointPmf> {
    if p.len() != 3 || q.len() != 3 {
        return Err(Error::Construction("tri-atomic family needs three atoms per marginal".into()));
    }
    let s = cyclic_remainder(3, 0, 1, 2, eps);
    make_quasi_independent(vec![1.0, 2.0, 3.0], p, vec![1.0, 2.0, 3.0], q, &s)
}

/// Admissible range of `eps` for [`tri_atomic_quasi_independent`].
pub fn tri_atomic_eps_range(p: &[f64], q: &[f64]) -> (f64, f64) {
    let lo = -(p[0] * q[1]).min(p[1] * q[2]).min(p[2] * q[0]);
    let hi = (p[0] * q[2]).min(p[1] * q[0]).min(p[2] * q[1]);
    (lo, hi)
}

/// Antisymmetric, zero-row-sum matrix carrying `eps` around the directed
/// cycle `a -> b -> c -> a`.
pub fn cyclic_remainder(n: usize, a: usize, b: usize, c: usize, eps: f64) -> Vec<Vec<f64>> {
    let mut s = vec![vec![0.0; n]; n];
    for (i, j) in [(a, b), (b, c), (c, a)] {
        s[i][j] += eps;
        s[j][i] -= eps;
    }
    s
}

/// `P = r D + (1 - r) p p' + S` on `atoms`; `S = 0` gives the exchangeable
/// r-Fréchet law.
pub fn make_quasi_frechet(atoms: Vec<f64>, p: &[f64], r: f64, s: Option<&[Vec<f64>]>) -> Result<JointPmf> {
    let n = p.len();
    if atoms.len() != n {
        return Err(Error::Construction("marginal length must match atom count".into()));
    }
    let bounds = r_bounds(p).map_err(construction)?;
    if !bounds.contains(r, SHAPE_TOL) {
        return Err(Error::Construction(format!("r = {r} outside admissible range [{}, 1]", bounds.lower)));
    }
    if let Some(s) = s {
        check_remainder(s, n)?;
    }
    let mut probs = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let diag = if i == j { r * p[i] } else { 0.0 };
            let rem = s.map_or(0.0, |s| s[i][j]);
            probs[i][j] = nonnegative(diag + (1.0 - r) * p[i] * p[j] + rem, i, j)?;
        }
    }
    JointPmf::square(atoms, probs).map_err(construction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bivariate::structure::{correlation, is_quasi_independent, quasi_frechet_fit};

    const U3: [f64; 3] = [1.0 / 3.0; 3];

    #[test]
    fn zero_remainder_is_independent() {
        let s = vec![vec![0.0; 3]; 3];
        let pmf = make_quasi_independent(vec![1.0, 2.0, 3.0], &U3, vec![1.0, 2.0, 3.0], &[0.2, 0.3, 0.5], &s).unwrap();
        for (i, row) in pmf.probs().iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, U3[i] * [0.2, 0.3, 0.5][j]);
            }
        }
    }

    #[test]
    fn boundary_eps_gives_zero_entry() {
        let p = [0.2, 0.3, 0.5];
        let q = [0.4, 0.4, 0.2];
        let (lo, hi) = tri_atomic_eps_range(&p, &q);
        let pmf = tri_atomic_quasi_independent(&p, &q, hi).unwrap();
        assert!(pmf.probs().iter().flatten().any(|v| *v == 0.0));
        assert!(is_quasi_independent(&pmf, 1e-12));
        let pmf = tri_atomic_quasi_independent(&p, &q, lo).unwrap();
        assert!(pmf.probs().iter().flatten().any(|v| *v == 0.0));
        assert!(matches!(tri_atomic_quasi_independent(&p, &q, hi + 1e-3), Err(Error::Construction(_))));
        assert!(matches!(tri_atomic_quasi_independent(&p, &q, lo - 1e-3), Err(Error::Construction(_))));
    }

    #[test]
    fn remainder_checks() {
        let mut s = cyclic_remainder(3, 0, 1, 2, 0.01);
        s[0][1] += 0.01;
        let err = make_quasi_independent(vec![1.0, 2.0, 3.0], &U3, vec![1.0, 2.0, 3.0], &U3, &s).unwrap_err();
        assert!(err.to_string().contains("antisymmetric"));
        // Antisymmetric but with nonzero row sums.
        let mut s = vec![vec![0.0; 3]; 3];
        s[0][1] = 0.01;
        s[1][0] = -0.01;
        let err = make_quasi_independent(vec![1.0, 2.0, 3.0], &U3, vec![1.0, 2.0, 3.0], &U3, &s).unwrap_err();
        assert!(err.to_string().contains("sums"));
    }

    #[test]
    fn remainder_outside_support_rejected() {
        // x on {1,2,3}, y on {2,3,4}: cells involving atom 1 or 4 in the wrong slot must stay zero.
        let s = cyclic_remainder(4, 0, 1, 2, 0.01);
        let err = make_quasi_independent(vec![1.0, 2.0, 3.0], &U3, vec![2.0, 3.0, 4.0], &U3, &s).unwrap_err();
        assert!(err.to_string().contains("outside"));
    }

    #[test]
    fn frechet_examples() {
        let p = [0.2, 0.3, 0.5];
        let pmf = make_quasi_frechet(vec![1.0, 2.0, 3.0], &p, 1.0, None).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(pmf.probs()[i][j], if i == j { p[i] } else { 0.0 });
            }
        }
        let low = make_quasi_frechet(vec![1.0, 2.0, 3.0], &U3, -0.5, None).unwrap();
        assert!((correlation(&low).unwrap() + 0.5).abs() < 1e-14);
        assert!(make_quasi_frechet(vec![1.0, 2.0, 3.0], &U3, -0.51, None).is_err());

        let s = cyclic_remainder(3, 0, 1, 2, 0.01);
        let skew = make_quasi_frechet(vec![1.0, 2.0, 3.0], &U3, 0.3, Some(&s)).unwrap();
        assert!((skew.probs()[0][1] - skew.probs()[1][0] - 0.02).abs() < 1e-15);
        assert!((quasi_frechet_fit(&skew, 1e-12).unwrap().unwrap() - 0.3).abs() < 1e-14);
        let big = cyclic_remainder(3, 0, 1, 2, 0.5);
        assert!(make_quasi_frechet(vec![1.0, 2.0, 3.0], &U3, 0.3, Some(&big)).is_err());
    }
}
