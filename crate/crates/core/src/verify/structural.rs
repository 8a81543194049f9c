use serde::{Deserialize, Serialize};

use super::transforms::Mode;
use crate::bivariate::{correlation, is_quasi_independent, quasi_frechet_fit, JointPmf};
use crate::error::{Error, Result};

/// Which characterization decided the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructuralRule {
    QuasiIndependent,
    QuasiFrechet,
    NotQuasiFrechet,
    /// Both marginals on the same two atoms: every map is affine there.
    BiAtomicSameSupport,
    /// Both marginals two-point with different supports: increasing maps act
    /// as increasing affine maps on each support.
    BiAtomicIncreasing,
    BiAtomicDifferentSupports,
    /// Different marginals, not both two-point, and not quasi-independent.
    DifferentMarginals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralVerdict {
    pub invariant: bool,
    /// The invariant correlation when `invariant`.
    pub r: Option<f64>,
    pub rule: StructuralRule,
}

/// The exact characterization of invariant correlation for a finite pmf
/// under the admissible class of `mode`.
pub fn structural_classification(pmf: &JointPmf, mode: Mode, tol: f64) -> Result<StructuralVerdict> {
    if pmf.x_support_size() < 2 || pmf.y_support_size() < 2 {
        return Err(Error::Structure("a marginal is degenerate".into()));
    }
    let verdict = |invariant: bool, r: Option<f64>, rule| Ok(StructuralVerdict { invariant, r, rule });
    if is_quasi_independent(pmf, tol) {
        return verdict(true, Some(0.0), StructuralRule::QuasiIndependent);
    }
    if pmf.identical_marginals() {
        return match quasi_frechet_fit(pmf, tol)? {
            Some(r) => verdict(true, Some(r), StructuralRule::QuasiFrechet),
            None => verdict(false, None, StructuralRule::NotQuasiFrechet),
        };
    }
    if pmf.x_support_size() == 2 && pmf.y_support_size() == 2 {
        let r = correlation(pmf)?;
        if pmf.x_atoms() == pmf.y_atoms() {
            return verdict(true, Some(r), StructuralRule::BiAtomicSameSupport);
        }
        return match mode {
            Mode::Increasing => verdict(true, Some(r), StructuralRule::BiAtomicIncreasing),
            Mode::All => verdict(false, None, StructuralRule::BiAtomicDifferentSupports),
        };
    }
    verdict(false, None, StructuralRule::DifferentMarginals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bivariate::make_quasi_frechet;

    #[test]
    fn table() {
        let ind = JointPmf::independent(vec![0.0, 1.0, 2.0], &[0.2, 0.3, 0.5], vec![1.0, 5.0], &[0.5, 0.5]).unwrap();
        let v = structural_classification(&ind, Mode::All, 1e-12).unwrap();
        assert_eq!((v.invariant, v.rule), (true, StructuralRule::QuasiIndependent));

        let qf = make_quasi_frechet(vec![1.0, 2.0, 3.0], &[0.2, 0.3, 0.5], 0.3, None).unwrap();
        let v = structural_classification(&qf, Mode::Increasing, 1e-12).unwrap();
        assert!(v.invariant && (v.r.unwrap() - 0.3).abs() < 1e-12);

        let bi = JointPmf::new(vec![0.0, 1.0], vec![0.0, 2.0], vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        assert!(!structural_classification(&bi, Mode::All, 1e-12).unwrap().invariant);
        let v = structural_classification(&bi, Mode::Increasing, 1e-12).unwrap();
        assert!(v.invariant && (v.r.unwrap() - 0.6).abs() < 1e-12);

        let same = JointPmf::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![vec![0.5, 0.2], vec![0.1, 0.2]]).unwrap();
        let v = structural_classification(&same, Mode::All, 1e-12).unwrap();
        assert_eq!(v.rule, StructuralRule::BiAtomicSameSupport);

        let mixed =
            JointPmf::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0], vec![vec![0.3, 0.0], vec![0.1, 0.2], vec![0.0, 0.4]])
                .unwrap();
        let v = structural_classification(&mixed, Mode::Increasing, 1e-12).unwrap();
        assert_eq!((v.invariant, v.rule), (false, StructuralRule::DifferentMarginals));
    }
}
