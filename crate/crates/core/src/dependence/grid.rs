use serde::{Deserialize, Deserializer, Serialize};

use crate::bivariate::JointPmf;
use crate::error::{Error, Result};
use crate::models::GammaModel;

const MASS_TOL: f64 = 1e-12;

/// Default bound on the number of product-grid cells.
pub const DEFAULT_MAX_CELLS: usize = 4096;

/// A `d`-variate law on a finite product grid. `probs` is row-major with the
/// last coordinate varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPmf {
    d: usize,
    levels: Vec<Vec<f64>>,
    probs: Vec<f64>,
    #[serde(skip)]
    strides: Vec<usize>,
}

impl GridPmf {
    pub fn new(levels: Vec<Vec<f64>>, probs: Vec<f64>) -> Result<Self> {
        let d = levels.len();
        let mut problems = Vec::new();
        if d == 0 {
            problems.push("need at least one coordinate".to_string());
        }
        for (k, l) in levels.iter().enumerate() {
            if l.is_empty() || l.iter().any(|v| !v.is_finite()) || l.windows(2).any(|w| !(w[0] < w[1])) {
                problems.push(format!("levels of coordinate {} must be finite and strictly increasing", k + 1));
            }
        }
        let cells = levels.iter().try_fold(1usize, |a, l| a.checked_mul(l.len()));
        match cells {
            Some(c) if c == probs.len() => {}
            _ => problems.push(format!("probability table has {} entries, grid needs {cells:?}", probs.len())),
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        if probs.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            problems.push("probabilities must be finite and nonnegative".into());
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            problems.push(format!("total mass {total} is not 1"));
        }
        let mut strides = vec![1usize; d];
        for k in (0..d.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * levels[k + 1].len();
        }
        let grid = Self { d, levels, probs, strides };
        for k in 0..d {
            for (t, m) in grid.marginal(k).iter().enumerate() {
                if !(*m > 0.0) {
                    problems.push(format!("coordinate {} level {} has no mass", k + 1, grid.levels[k][t]));
                }
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(grid)
    }

    pub fn from_joint(pmf: &JointPmf) -> Self {
        let probs = pmf.probs().iter().flatten().copied().collect();
        Self::new(vec![pmf.x_atoms().to_vec(), pmf.y_atoms().to_vec()], probs).expect("valid joint pmf")
    }

    /// Independent coordinates with the given marginal masses.
    pub fn independent(levels: Vec<Vec<f64>>, marginals: &[Vec<f64>]) -> Result<Self> {
        let shape: Vec<usize> = levels.iter().map(Vec::len).collect();
        let cells: usize = shape.iter().product();
        let mut probs = vec![1.0; cells];
        for (c, p) in probs.iter_mut().enumerate() {
            let idx = unflatten(c, &shape);
            for (k, &t) in idx.iter().enumerate() {
                *p *= marginals[k][t];
            }
        }
        Self::new(levels, probs)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn shape(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.probs.len()
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Level indices of flat cell `c`.
    pub fn index_of(&self, c: usize) -> Vec<usize> {
        unflatten(c, &self.shape())
    }

    pub fn marginal(&self, k: usize) -> Vec<f64> {
        let len = self.levels[k].len();
        let mut m = vec![0.0; len];
        for (c, p) in self.probs.iter().enumerate() {
            m[(c / self.strides[k]) % len] += p;
        }
        m
    }
}

pub(crate) fn unflatten(mut c: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for k in (0..shape.len()).rev() {
        idx[k] = c % shape[k];
        c /= shape[k];
    }
    idx
}

impl<'de> Deserialize<'de> for GridPmf {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            d: Option<usize>,
            levels: Vec<Vec<f64>>,
            probs: Vec<f64>,
        }
        let raw = Raw::deserialize(de)?;
        if raw.d.is_some_and(|d| d != raw.levels.len()) {
            return Err(serde::de::Error::custom("d does not match the number of level lists"));
        }
        GridPmf::new(raw.levels, raw.probs).map_err(serde::de::Error::custom)
    }
}

/// The exact law of `ceil(n U_i)/n` under a Γ·U model: coordinates in one
/// block share a level, blocks are independent and uniform on `n` levels.
pub fn discretized_gamma_grid(model: &GammaModel, n_levels: usize) -> Result<GridPmf> {
    let d = model.d();
    if n_levels < 2 {
        return Err(Error::validation("need at least two levels"));
    }
    let cells = n_levels.checked_pow(d as u32).filter(|c| *c <= DEFAULT_MAX_CELLS);
    let Some(cells) = cells else {
        return Err(Error::Capacity(format!("{n_levels}^{d} exceeds {DEFAULT_MAX_CELLS} cells")));
    };
    let shape = vec![n_levels; d];
    let nf = n_levels as f64;
    let mut probs = vec![0.0; cells];
    for (c, p) in probs.iter_mut().enumerate() {
        let idx = unflatten(c, &shape);
        for (part, w) in model.components() {
            let labels = part.labels();
            let consistent = (0..d).all(|i| (0..i).all(|j| labels[i] != labels[j] || idx[i] == idx[j]));
            if consistent {
                *p += w * nf.powi(-(part.block_count() as i32));
            }
        }
    }
    let levels = vec![(1..=n_levels).map(|k| k as f64 / nf).collect(); d];
    GridPmf::new(levels, probs)
}
