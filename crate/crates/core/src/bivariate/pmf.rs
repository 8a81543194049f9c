use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for structural identities on finite supports.
pub const DEFAULT_STRUCT_TOL: f64 = 1e-12;
const MASS_TOL: f64 = 1e-12;

/// Joint law of `(X, Y)` on finitely many atoms.
///
/// `probs[i][j] = P(X = x_atoms[i], Y = y_atoms[j])`. Every atom carries
/// positive marginal mass. Structural checks work on the union grid
/// `x_atoms ∪ y_atoms` (sorted, duplicates collapsed), with zero rows and
/// columns for atoms outside a variable's support.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    x_atoms: Vec<f64>,
    y_atoms: Vec<f64>,
    probs: Vec<Vec<f64>>,
    p: Vec<f64>,
    q: Vec<f64>,
    grid: Vec<f64>,
    x_index: Vec<usize>,
    y_index: Vec<usize>,
}

fn check_atoms(name: &str, atoms: &[f64], problems: &mut Vec<String>) {
    if atoms.is_empty() {
        problems.push(format!("{name} is empty"));
    }
    if atoms.iter().any(|a| !a.is_finite()) {
        problems.push(format!("{name} has a non-finite value"));
    }
    if atoms.windows(2).any(|w| !(w[0] < w[1])) {
        problems.push(format!("{name} is not strictly increasing"));
    }
}

impl JointPmf {
    pub fn new(x_atoms: Vec<f64>, y_atoms: Vec<f64>, probs: Vec<Vec<f64>>) -> Result<Self> {
        let mut problems = Vec::new();
        check_atoms("x_atoms", &x_atoms, &mut problems);
        check_atoms("y_atoms", &y_atoms, &mut problems);
        let (m, n) = (x_atoms.len(), y_atoms.len());
        if probs.len() != m || probs.iter().any(|r| r.len() != n) {
            problems.push(format!("probability matrix must be {m}x{n}"));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        if probs.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
            problems.push("probabilities must be finite and nonnegative".into());
        }
        let total: f64 = probs.iter().flatten().sum();
        if (total - 1.0).abs() > MASS_TOL {
            problems.push(format!("total mass {total} is not 1"));
        }
        let p: Vec<f64> = probs.iter().map(|r| r.iter().sum()).collect();
        let q: Vec<f64> = (0..n).map(|j| probs.iter().map(|r| r[j]).sum()).collect();
        for (i, v) in p.iter().enumerate() {
            if !(*v > 0.0) {
                problems.push(format!("x atom {} has no mass", x_atoms[i]));
            }
        }
        for (j, v) in q.iter().enumerate() {
            if !(*v > 0.0) {
                problems.push(format!("y atom {} has no mass", y_atoms[j]));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }

        let mut grid: Vec<f64> = x_atoms.iter().chain(&y_atoms).copied().collect();
        grid.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        grid.dedup();
        let locate = |v: &f64| grid.binary_search_by(|g| g.partial_cmp(v).expect("finite")).expect("in grid");
        let x_index = x_atoms.iter().map(locate).collect();
        let y_index = y_atoms.iter().map(locate).collect();
        Ok(Self { x_atoms, y_atoms, probs, p, q, grid, x_index, y_index })
    }

    /// Both coordinates on the same atoms.
    pub fn square(atoms: Vec<f64>, probs: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(atoms.clone(), atoms, probs)
    }

    /// `P = p q'`.
    pub fn independent(x_atoms: Vec<f64>, p: &[f64], y_atoms: Vec<f64>, q: &[f64]) -> Result<Self> {
        let probs = p.iter().map(|a| q.iter().map(|b| a * b).collect()).collect();
        Self::new(x_atoms, y_atoms, probs)
    }

    pub fn x_atoms(&self) -> &[f64] {
        &self.x_atoms
    }

    pub fn y_atoms(&self) -> &[f64] {
        &self.y_atoms
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    /// Row sums: the law of `X`.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Column sums: the law of `Y`.
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Sorted union of both atom sets.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Grid position of each x atom.
    pub fn x_grid_index(&self) -> &[usize] {
        &self.x_index
    }

    /// Grid position of each y atom.
    pub fn y_grid_index(&self) -> &[usize] {
        &self.y_index
    }

    /// The joint law embedded on the union grid.
    pub fn grid_probs(&self) -> Vec<Vec<f64>> {
        let n = self.grid.len();
        let mut out = vec![vec![0.0; n]; n];
        for (i, row) in self.probs.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                out[self.x_index[i]][self.y_index[j]] = *v;
            }
        }
        out
    }

    /// Marginal of `X` on the union grid.
    pub fn grid_p(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for (i, v) in self.p.iter().enumerate() {
            out[self.x_index[i]] = *v;
        }
        out
    }

    /// Marginal of `Y` on the union grid.
    pub fn grid_q(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for (j, v) in self.q.iter().enumerate() {
            out[self.y_index[j]] = *v;
        }
        out
    }

    pub fn identical_marginals(&self) -> bool {
        self.x_atoms == self.y_atoms && self.p.iter().zip(&self.q).all(|(a, b)| (a - b).abs() <= MASS_TOL)
    }

    pub fn x_support_size(&self) -> usize {
        self.x_atoms.len()
    }

    pub fn y_support_size(&self) -> usize {
        self.y_atoms.len()
    }
}

#[derive(Serialize, Deserialize)]
struct JointPmfRepr {
    x_atoms: Vec<f64>,
    y_atoms: Vec<f64>,
    #[serde(rename = "P")]
    probs: Vec<Vec<f64>>,
}

impl Serialize for JointPmf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        JointPmfRepr { x_atoms: self.x_atoms.clone(), y_atoms: self.y_atoms.clone(), probs: self.probs.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for JointPmf {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = JointPmfRepr::deserialize(de)?;
        JointPmf::new(r.x_atoms, r.y_atoms, r.probs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(JointPmf::new(vec![1.0, 1.0], vec![1.0], vec![vec![0.5], vec![0.5]]).is_err());
        assert!(JointPmf::new(vec![1.0], vec![1.0], vec![vec![0.9]]).is_err());
        assert!(JointPmf::new(vec![1.0, 2.0], vec![1.0], vec![vec![1.0], vec![0.0]]).is_err());
        assert!(JointPmf::new(vec![1.0], vec![1.0, 2.0], vec![vec![1.0]]).is_err());
        assert!(JointPmf::new(vec![1.0, 2.0], vec![1.0], vec![vec![1.5], vec![-0.5]]).is_err());
    }

    #[test]
    fn union_grid_embedding() {
        let pmf = JointPmf::new(vec![0.0, 2.0], vec![1.0, 2.0], vec![vec![0.1, 0.2], vec![0.3, 0.4]]).unwrap();
        assert_eq!(pmf.grid(), &[0.0, 1.0, 2.0]);
        let g = pmf.grid_probs();
        assert_eq!(g[0], vec![0.0, 0.1, 0.2]);
        assert_eq!(g[1], vec![0.0, 0.0, 0.0]);
        assert_eq!(g[2], vec![0.0, 0.3, 0.4]);
        assert_eq!(pmf.grid_q(), vec![0.0, 0.4, 0.6000000000000001]);
        assert!(!pmf.identical_marginals());
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"x_atoms":[1,2],"y_atoms":[1,2],"P":[[0.25,0.25],[0.25,0.25]]}"#;
        let pmf: JointPmf = serde_json::from_str(s).unwrap();
        assert!(pmf.identical_marginals());
        let back: JointPmf = serde_json::from_str(&serde_json::to_string(&pmf).unwrap()).unwrap();
        assert_eq!(back, pmf);
    }
}
