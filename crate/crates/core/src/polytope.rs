//! Membership in the clique partition polytope.
//!
//! A correlation matrix `R` is an invariant correlation matrix of some
//! continuous random vector with identical marginals exactly when its upper
//! triangle is a convex combination of clique partition points. That is a
//! linear feasibility problem, solved here as
//!
//! ```text
//! min 1'z   s.t.  V alpha + z = r~,  alpha >= 0, z >= 0
//! ```
//!
//! where the columns of `V` are the upper triangles of the clique partition
//! points (plus a trailing 1 for the weight-sum row) and `r~` is the upper
//! triangle of `R` followed by 1. `R` is a member iff the optimum is zero.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{lp_solve, rational_from_f64, LpOutcome};
use crate::partitions::{clique_point, enumerate_partitions_capped, upper_pairs, SetPartition, DEFAULT_MAX_DIM};

/// Default LP residual threshold for classifying a matrix as a member.
pub const DEFAULT_TOL: f64 = 1e-9;
const SHAPE_TOL: f64 = 1e-12;
/// Largest dimension accepted by [`membership_exact`].
pub const EXACT_MAX_DIM: usize = 5;

/// A symmetric matrix with unit diagonal and entries in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrMatrix {
    d: usize,
    rows: Vec<Vec<f64>>,
}

impl CorrMatrix {
    /// Entries may exceed 1 in magnitude by rounding (up to `1e-12`); they
    /// are clamped.
    pub fn new(mut rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::Dimension { d, min: 1, max: usize::MAX });
        }
        let mut problems = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                problems.push(format!("row {} has length {}, expected {d}", i + 1, row.len()));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        for i in 0..d {
            if !rows[i].iter().all(|v| v.is_finite()) {
                problems.push(format!("row {} has a non-finite entry", i + 1));
                continue;
            }
            if (rows[i][i] - 1.0).abs() > SHAPE_TOL {
                problems.push(format!("diagonal entry ({0},{0}) = {1} is not 1", i + 1, rows[i][i]));
            }
            for j in i + 1..d {
                if (rows[i][j] - rows[j][i]).abs() > SHAPE_TOL {
                    problems.push(format!("entries ({},{}) and ({},{}) differ", i + 1, j + 1, j + 1, i + 1));
                }
                if rows[i][j].abs() > 1.0 + SHAPE_TOL {
                    problems.push(format!("entry ({},{}) = {} outside [-1, 1]", i + 1, j + 1, rows[i][j]));
                }
            }
        }
        if problems.is_empty() {
            for v in rows.iter_mut().flatten() {
                *v = v.clamp(-1.0, 1.0);
            }
            Ok(Self { d, rows })
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn identity(d: usize) -> Self {
        let rows = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self { d, rows }
    }

    /// Matrix with every off-diagonal entry equal to `r`.
    pub fn constant(d: usize, r: f64) -> Result<Self> {
        Self::new((0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { r }).collect()).collect())
    }

    /// Builds a matrix from its upper triangle in [`upper_pairs`] order.
    pub fn from_upper(d: usize, upper: &[f64]) -> Result<Self> {
        let expected = d * d.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::validation(format!(
                "expected {expected} upper-triangle entries for d = {d}, got {}",
                upper.len()
            )));
        }
        let mut rows = Self::identity(d).rows;
        for ((i, j), &v) in upper_pairs(d).zip(upper) {
            rows[i][j] = v;
            rows[j][i] = v;
        }
        Self::new(rows)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Upper triangle in `(1,2), (1,3), (2,3), (1,4), ...` order.
    pub fn upper_triangle(&self) -> Vec<f64> {
        upper_pairs(self.d).map(|(i, j)| self.rows[i][j]).collect()
    }

    pub fn max_abs_diff(&self, other: &CorrMatrix) -> f64 {
        self.rows.iter().flatten().zip(other.rows.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[derive(Deserialize)]
struct CorrMatrixRepr {
    d: usize,
    rows: Vec<Vec<f64>>,
}

impl<'de> Deserialize<'de> for CorrMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = CorrMatrixRepr::deserialize(de)?;
        if repr.rows.len() != repr.d {
            return Err(serde::de::Error::custom(format!("d = {} but {} rows given", repr.d, repr.rows.len())));
        }
        CorrMatrix::new(repr.rows).map_err(serde::de::Error::custom)
    }
}

/// The membership constraint matrix and its index maps.
#[derive(Debug, Clone)]
pub struct ConstraintMatrix {
    /// `(1 + d(d-1)/2) x Bell(d)` entries, all 0 or 1.
    pub rows: Vec<Vec<u8>>,
    /// Pair `(i, j)` (0-based) of each row; `None` marks the weight-sum row.
    pub row_pairs: Vec<Option<(usize, usize)>>,
    /// Partition behind each column.
    pub columns: Vec<SetPartition>,
}

pub fn assemble_vd(d: usize) -> Result<ConstraintMatrix> {
    assemble_vd_capped(d, DEFAULT_MAX_DIM)
}

pub fn assemble_vd_capped(d: usize, max_dim: usize) -> Result<ConstraintMatrix> {
    if d < 2 || d > max_dim {
        return Err(Error::Dimension { d, min: 2, max: max_dim });
    }
    let columns = enumerate_partitions_capped(d, max_dim)?;
    let mut row_pairs: Vec<Option<(usize, usize)>> = upper_pairs(d).map(Some).collect();
    row_pairs.push(None);
    let rows = row_pairs
        .iter()
        .map(|pair| match pair {
            Some((i, j)) => columns.iter().map(|p| u8::from(p.same_block(*i, *j))).collect(),
            None => vec![1; columns.len()],
        })
        .collect();
    Ok(ConstraintMatrix { rows, row_pairs, columns })
}

/// One mixture component of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPartition {
    #[serde(flatten)]
    pub partition: PartitionBlocks,
    pub alpha: f64,
}

/// Serialized as `{"blocks": [[1,2],[3]]}`; `d` is implied by the blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionBlocks {
    pub blocks: Vec<Vec<usize>>,
}

impl PartitionBlocks {
    pub fn to_partition(&self) -> Result<SetPartition> {
        let d = self.blocks.iter().map(Vec::len).sum();
        SetPartition::from_blocks(d, &self.blocks)
    }
}

impl From<&SetPartition> for PartitionBlocks {
    fn from(p: &SetPartition) -> Self {
        Self { blocks: p.blocks() }
    }
}

/// Outcome of a membership test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipCert {
    pub member: bool,
    /// Optimal LP objective; non-finite (serialized as `null`) when the LP was skipped.
    #[serde(with = "nullable_f64")]
    pub residual: f64,
    pub weights: Vec<WeightedPartition>,
    pub reconstruction_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl MembershipCert {
    pub fn partitions(&self) -> Result<Vec<(SetPartition, f64)>> {
        self.weights.iter().map(|w| Ok((w.partition.to_partition()?, w.alpha))).collect()
    }
}

mod nullable_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

pub const NEGATIVE_ENTRY_REASON: &str = "negative entry fast-reject";

/// Tests whether `r` lies in the clique partition polytope.
pub fn membership(r: &CorrMatrix, tol: f64) -> Result<MembershipCert> {
    membership_capped(r, tol, DEFAULT_MAX_DIM)
}

pub fn membership_capped(r: &CorrMatrix, tol: f64, max_dim: usize) -> Result<MembershipCert> {
    if !(tol > 0.0) {
        return Err(Error::validation("tolerance must be positive"));
    }
    let d = r.d();
    if d > max_dim {
        return Err(Error::Dimension { d, min: 1, max: max_dim });
    }
    let upper = r.upper_triangle();
    if upper.iter().any(|&v| v < 0.0) {
        return Ok(MembershipCert {
            member: false,
            residual: f64::INFINITY,
            weights: Vec::new(),
            reconstruction_error: f64::INFINITY,
            reason: Some(NEGATIVE_ENTRY_REASON.to_string()),
        });
    }
    if d == 1 {
        let p = SetPartition::full(1);
        return Ok(MembershipCert {
            member: true,
            residual: 0.0,
            weights: vec![WeightedPartition { partition: (&p).into(), alpha: 1.0 }],
            reconstruction_error: 0.0,
            reason: None,
        });
    }

    let vd = assemble_vd_capped(d, max_dim)?;
    let n_alpha = vd.columns.len();
    let n_rows = vd.rows.len();
    let mut rhs = upper.clone();
    rhs.push(1.0);
    // Variables: alpha (Bell(d)) then z (one per row).
    let lhs: Vec<Vec<f64>> = vd
        .rows
        .iter()
        .enumerate()
        .map(|(k, row)| {
            row.iter().map(|&v| f64::from(v)).chain((0..n_rows).map(|t| if t == k { 1.0 } else { 0.0 })).collect()
        })
        .collect();
    let cost: Vec<f64> = (0..n_alpha).map(|_| 0.0).chain((0..n_rows).map(|_| 1.0)).collect();
    let sol = match lp_solve(&cost, &lhs, &rhs)? {
        LpOutcome::Optimal(s) => s,
        // The point alpha = 0, z = r~ is always feasible and the objective is bounded below.
        LpOutcome::Infeasible => return Err(Error::Numerical("membership LP reported infeasible".into())),
        LpOutcome::Unbounded => return Err(Error::Numerical("membership LP reported unbounded".into())),
    };
    let residual = sol.objective.max(0.0);
    let alpha = &sol.x[..n_alpha];

    if residual > tol {
        let error = reconstruction_error(&vd, alpha, &rhs);
        return Ok(MembershipCert {
            member: false,
            residual,
            weights: Vec::new(),
            reconstruction_error: error,
            reason: None,
        });
    }

    let mut weights = select_weights(&vd, alpha, |a| a > tol);
    let mut error = reconstruction_error_weights(&vd, &weights, &rhs);
    if error > 10.0 * tol {
        weights = select_weights(&vd, alpha, |a| a > 0.0);
        error = reconstruction_error_weights(&vd, &weights, &rhs);
    }
    Ok(MembershipCert {
        member: true,
        residual,
        weights: weights
            .into_iter()
            .map(|(k, a)| WeightedPartition { partition: (&vd.columns[k]).into(), alpha: a })
            .collect(),
        reconstruction_error: error,
        reason: None,
    })
}

fn select_weights(vd: &ConstraintMatrix, alpha: &[f64], keep: impl Fn(f64) -> bool) -> Vec<(usize, f64)> {
    let kept: Vec<(usize, f64)> = alpha.iter().copied().enumerate().filter(|&(_, a)| keep(a)).collect();
    let total: f64 = kept.iter().map(|&(_, a)| a).sum();
    debug_assert!(vd.columns.len() == alpha.len());
    kept.into_iter().map(|(k, a)| (k, a / total)).collect()
}

fn reconstruction_error(vd: &ConstraintMatrix, alpha: &[f64], rhs: &[f64]) -> f64 {
    let all: Vec<(usize, f64)> = alpha.iter().copied().enumerate().collect();
    reconstruction_error_weights(vd, &all, rhs)
}

/// Max-abs gap between `V alpha` and the target on the pair rows.
fn reconstruction_error_weights(vd: &ConstraintMatrix, weights: &[(usize, f64)], rhs: &[f64]) -> f64 {
    vd.rows
        .iter()
        .zip(&vd.row_pairs)
        .zip(rhs)
        .filter(|((_, pair), _)| pair.is_some())
        .map(|((row, _), &target)| {
            let fitted: f64 = weights.iter().map(|&(k, a)| a * f64::from(row[k])).sum();
            (fitted - target).abs()
        })
        .fold(0.0, f64::max)
}

/// `sum_l alpha_l * clique_point(partition_l)`.
pub fn reconstruct(weights: &[(SetPartition, f64)]) -> Result<CorrMatrix> {
    let Some((first, _)) = weights.first() else {
        return Err(Error::validation("no weights given"));
    };
    let d = first.d();
    if weights.iter().any(|(p, _)| p.d() != d) {
        return Err(Error::validation("partitions have different ground-set sizes"));
    }
    if let Some((p, a)) = weights.iter().find(|(_, a)| *a < -SHAPE_TOL) {
        return Err(Error::validation(format!("negative weight {a} on {p}")));
    }
    let total: f64 = weights.iter().map(|(_, a)| a).sum();
    if (total - 1.0).abs() > SHAPE_TOL {
        return Err(Error::validation(format!("weights sum to {total}, not 1")));
    }
    let mut rows = vec![vec![0.0; d]; d];
    for (p, a) in weights {
        let c = clique_point(p);
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v += a * f64::from(c.get(i, j));
            }
        }
    }
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    CorrMatrix::new(rows)
}

/// Result of a membership test carried out in exact rational arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMembership {
    pub member: bool,
    pub objective: BigRational,
    pub weights: Vec<(SetPartition, BigRational)>,
}

/// Exact-arithmetic variant of [`membership`] for `d <= 5`.
///
/// The entries of `r` are taken as the exact dyadic rationals they encode,
/// so a nonzero objective certifies non-membership without any tolerance.
pub fn membership_exact(r: &CorrMatrix) -> Result<ExactMembership> {
    let d = r.d();
    if !(2..=EXACT_MAX_DIM).contains(&d) {
        return Err(Error::Dimension { d, min: 2, max: EXACT_MAX_DIM });
    }
    let upper = r.upper_triangle();
    if upper.iter().any(|&v| v < 0.0) {
        return Ok(ExactMembership {
            member: false,
            objective: upper
                .iter()
                .filter(|v| **v < 0.0)
                .map(|&v| -rational_from_f64(v))
                .fold(BigRational::zero(), |a, b| a + b),
            weights: Vec::new(),
        });
    }
    let vd = assemble_vd(d)?;
    let n_alpha = vd.columns.len();
    let n_rows = vd.rows.len();
    let mut rhs: Vec<BigRational> = upper.iter().map(|&v| rational_from_f64(v)).collect();
    rhs.push(BigRational::one());
    let lhs: Vec<Vec<BigRational>> = vd
        .rows
        .iter()
        .enumerate()
        .map(|(k, row)| {
            row.iter()
                .map(|&v| BigRational::from_integer(v.into()))
                .chain((0..n_rows).map(|t| if t == k { BigRational::one() } else { BigRational::zero() }))
                .collect()
        })
        .collect();
    let cost: Vec<BigRational> =
        (0..n_alpha).map(|_| BigRational::zero()).chain((0..n_rows).map(|_| BigRational::one())).collect();
    let sol = lp_solve(&cost, &lhs, &rhs)?.optimal()?;
    let member = sol.objective.is_zero();
    let weights = if member {
        sol.x[..n_alpha]
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(k, a)| (vd.columns[k].clone(), a.clone()))
            .collect()
    } else {
        Vec::new()
    };
    Ok(ExactMembership { member, objective: sol.objective, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate_partitions;

    #[test]
    fn vd_shapes_and_columns() {
        let vd = assemble_vd(3).unwrap();
        assert_eq!(vd.rows.len(), 4);
        assert_eq!(vd.columns.len(), 5);
        let col = vd.columns.iter().position(|p| p.blocks() == vec![vec![1, 2], vec![3]]).unwrap();
        let column: Vec<u8> = vd.rows.iter().map(|r| r[col]).collect();
        assert_eq!(column, vec![1, 0, 0, 1]);

        let vd2 = assemble_vd(2).unwrap();
        assert_eq!(vd2.rows, vec![vec![1, 0], vec![1, 1]]);

        let vd4 = assemble_vd(4).unwrap();
        assert_eq!((vd4.rows.len(), vd4.columns.len()), (7, 15));
        assert!(assemble_vd(1).is_err());
        assert!(assemble_vd(13).is_err());
    }

    #[test]
    fn corr_matrix_validation() {
        assert!(CorrMatrix::new(vec![vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
        assert!(CorrMatrix::new(vec![vec![0.9, 0.5], vec![0.5, 1.0]]).is_err());
        assert!(CorrMatrix::new(vec![vec![1.0, 1.5], vec![1.5, 1.0]]).is_err());
        assert!(CorrMatrix::new(vec![vec![1.0, 0.5]]).is_err());
        let err = CorrMatrix::new(vec![vec![2.0, 0.5], vec![0.4, 1.0]]).unwrap_err();
        match err {
            Error::Validation(list) => assert_eq!(list.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn paper_non_member() {
        let r = CorrMatrix::from_upper(3, &[0.8, 0.5, 0.2]).unwrap();
        let cert = membership(&r, DEFAULT_TOL).unwrap();
        assert!(!cert.member);
        assert!(cert.residual > 1e-6);
        for tol in [1e-6, 1e-9, 1e-12] {
            assert!(!membership(&r, tol).unwrap().member);
        }
        let exact = membership_exact(&r).unwrap();
        assert!(!exact.member);
        assert!(exact.objective > BigRational::zero());
    }

    #[test]
    fn all_ones_and_identity() {
        for d in 2..=5 {
            let ones = CorrMatrix::constant(d, 1.0).unwrap();
            let cert = membership(&ones, DEFAULT_TOL).unwrap();
            assert!(cert.member);
            assert_eq!(cert.weights.len(), 1);
            assert_eq!(cert.weights[0].partition.blocks, vec![(1..=d).collect::<Vec<_>>()]);
            assert!((cert.weights[0].alpha - 1.0).abs() < 1e-12);

            let cert = membership(&CorrMatrix::identity(d), DEFAULT_TOL).unwrap();
            assert!(cert.member);
            assert_eq!(cert.weights.len(), 1);
            assert_eq!(cert.weights[0].partition.to_partition().unwrap(), SetPartition::singletons(d));
        }
    }

    #[test]
    fn half_matrix_member() {
        let r = CorrMatrix::constant(3, 0.5).unwrap();
        let cert = membership(&r, DEFAULT_TOL).unwrap();
        assert!(cert.member);
        assert!(cert.residual <= 1e-9);
        assert!(cert.reconstruction_error <= 1e-8);
        let back = reconstruct(&cert.partitions().unwrap()).unwrap();
        assert!(back.max_abs_diff(&r) <= 1e-8);
        assert!(membership_exact(&r).unwrap().member);
    }

    #[test]
    fn negative_fast_reject() {
        let r = CorrMatrix::from_upper(3, &[0.2, -0.1, 0.3]).unwrap();
        let cert = membership(&r, DEFAULT_TOL).unwrap();
        assert!(!cert.member);
        assert_eq!(cert.reason.as_deref(), Some(NEGATIVE_ENTRY_REASON));
        assert!(cert.residual > DEFAULT_TOL);
        let json = serde_json::to_string(&cert).unwrap();
        assert!(json.contains("\"residual\":null"));
    }

    #[test]
    fn vertices_are_members() {
        for d in 2..=6 {
            for p in enumerate_partitions(d).unwrap() {
                let r = CorrMatrix::new(clique_point(&p).rows()).unwrap();
                let cert = membership(&r, DEFAULT_TOL).unwrap();
                assert!(cert.member, "{p}");
                assert!(cert.reconstruction_error <= 1e-8);
            }
        }
    }

    #[test]
    fn reconstruct_examples() {
        let r = reconstruct(&[(SetPartition::singletons(4), 1.0)]).unwrap();
        assert_eq!(r, CorrMatrix::identity(4));
        let r = reconstruct(&[(SetPartition::full(3), 0.3), (SetPartition::singletons(3), 0.7)]).unwrap();
        assert!(r.upper_triangle().iter().all(|v| (v - 0.3).abs() < 1e-15));
        assert!(reconstruct(&[(SetPartition::full(3), 0.3)]).is_err());
        assert!(reconstruct(&[(SetPartition::full(3), 1.5), (SetPartition::singletons(3), -0.5)]).is_err());
        assert!(reconstruct(&[]).is_err());
    }

    #[test]
    fn deterministic_certificates() {
        let r = CorrMatrix::from_upper(4, &[0.4, 0.3, 0.5, 0.2, 0.1, 0.3]).unwrap();
        let a = serde_json::to_string(&membership(&r, DEFAULT_TOL).unwrap()).unwrap();
        let b = serde_json::to_string(&membership(&r, DEFAULT_TOL).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_shapes() {
        let r: CorrMatrix = serde_json::from_str(r#"{"d":3,"rows":[[1,0.8,0.5],[0.8,1,0.2],[0.5,0.2,1]]}"#).unwrap();
        assert_eq!(r.upper_triangle(), vec![0.8, 0.5, 0.2]);
        assert!(serde_json::from_str::<CorrMatrix>(r#"{"d":2,"rows":[[1,0.8,0.5],[0.8,1,0.2],[0.5,0.2,1]]}"#).is_err());
        let cert = membership(&CorrMatrix::identity(2), DEFAULT_TOL).unwrap();
        let v: serde_json::Value = serde_json::to_value(&cert).unwrap();
        assert_eq!(v["member"], true);
        assert_eq!(v["weights"][0]["blocks"], serde_json::json!([[1], [2]]));
        assert_eq!(v["weights"][0]["alpha"], 1.0);
        let back: MembershipCert = serde_json::from_value(v).unwrap();
        assert_eq!(back, cert);
    }
}
