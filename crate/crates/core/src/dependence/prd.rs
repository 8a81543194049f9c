use std::ops::ControlFlow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grid::{unflatten, GridPmf, DEFAULT_MAX_CELLS};
use crate::error::{Error, Result};
use crate::models::row_rng;

/// Default bound on the number of up-sets visited by exhaustive checks.
pub const DEFAULT_MAX_UPSETS: u64 = 2_000_000;

/// How the conditioning event on `X_i` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    /// `P(X in A | X_i = x)`.
    Equal,
    /// `P(X in A | X_i <= x)`, the weaker variant.
    AtMost,
}

/// A pair of adjacent levels where the conditional probability drops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrdWitness {
    /// 1-based coordinate.
    pub index: usize,
    /// Cells of the increasing set as 1-based level tuples.
    pub upset: Vec<Vec<usize>>,
    pub x: f64,
    pub x_prime: f64,
    pub p_x: f64,
    pub p_x_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrdReport {
    pub prd: bool,
    pub conditioning: Conditioning,
    pub upsets_checked: u64,
    /// True when the increasing sets were sampled rather than enumerated.
    pub sampled: bool,
    pub witness: Option<PrdWitness>,
}

/// Calls `visit` on every up-set of the product order on a grid of `shape`,
/// given as a membership mask over row-major cells. Cells are decided from
/// the top down; a cell may join only once all its immediate successors
/// have, so each branch ends in a distinct up-set.
pub fn for_each_upset(
    shape: &[usize],
    max_upsets: u64,
    mut visit: impl FnMut(&[bool]) -> ControlFlow<()>,
) -> Result<u64> {
    let cells: usize = shape.iter().product();
    let mut strides = vec![1usize; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    let succ: Vec<Vec<usize>> = (0..cells)
        .map(|c| {
            let idx = unflatten(c, shape);
            (0..shape.len()).filter(|&k| idx[k] + 1 < shape[k]).map(|k| c + strides[k]).collect()
        })
        .collect();
    let mut state = Walk { succ, included: vec![false; cells], count: 0, max: max_upsets, stopped: false };
    state.descend(cells, &mut visit)?;
    Ok(state.count)
}

struct Walk {
    succ: Vec<Vec<usize>>,
    included: Vec<bool>,
    count: u64,
    max: u64,
    stopped: bool,
}

impl Walk {
    /// Decides cells `remaining - 1, ..., 0`.
    fn descend(&mut self, remaining: usize, visit: &mut impl FnMut(&[bool]) -> ControlFlow<()>) -> Result<()> {
        if self.stopped {
            return Ok(());
        }
        if remaining == 0 {
            self.count += 1;
            if self.count > self.max {
                return Err(Error::Capacity(format!("more than {} increasing sets; use the sampled check", self.max)));
            }
            if visit(&self.included).is_break() {
                self.stopped = true;
            }
            return Ok(());
        }
        let c = remaining - 1;
        self.descend(c, visit)?;
        if self.succ[c].iter().all(|&s| self.included[s]) {
            self.included[c] = true;
            self.descend(c, visit)?;
            self.included[c] = false;
        }
        Ok(())
    }
}

/// Number of up-sets of a grid of `shape`.
pub fn count_upsets(shape: &[usize], max_upsets: u64) -> Result<u64> {
    for_each_upset(shape, max_upsets, |_| ControlFlow::Continue(()))
}

fn check_subset(grid: &GridPmf, subset: &[usize]) -> Result<()> {
    if subset.is_empty() || subset.iter().any(|&i| i >= grid.d()) {
        return Err(Error::validation(format!("subset must name coordinates in 1..={}", grid.d())));
    }
    Ok(())
}

/// First drop of `x -> P(A | X_i ~ x)` along coordinate `i`, if any.
fn first_drop(grid: &GridPmf, i: usize, mask: &[bool], cond: Conditioning, tol: f64) -> Option<(usize, f64, f64)> {
    let len = grid.levels()[i].len();
    let stride = grid.strides()[i];
    let mut in_a = vec![0.0; len];
    let mut all = vec![0.0; len];
    for (c, p) in grid.probs().iter().enumerate() {
        let t = (c / stride) % len;
        all[t] += p;
        if mask[c] {
            in_a[t] += p;
        }
    }
    if cond == Conditioning::AtMost {
        for t in 1..len {
            in_a[t] += in_a[t - 1];
            all[t] += all[t - 1];
        }
    }
    let f: Vec<f64> = in_a.iter().zip(&all).map(|(a, m)| a / m).collect();
    (0..len.saturating_sub(1)).find(|&t| f[t + 1] < f[t] - tol).map(|t| (t, f[t], f[t + 1]))
}

fn witness(grid: &GridPmf, i: usize, mask: &[bool], drop: (usize, f64, f64)) -> PrdWitness {
    let shape = grid.shape();
    let upset = mask
        .iter()
        .enumerate()
        .filter(|e| *e.1)
        .map(|(c, _)| unflatten(c, &shape).into_iter().map(|t| t + 1).collect())
        .collect();
    PrdWitness {
        index: i + 1,
        upset,
        x: grid.levels()[i][drop.0],
        x_prime: grid.levels()[i][drop.0 + 1],
        p_x: drop.1,
        p_x_prime: drop.2,
    }
}

/// Positive regression dependence on `subset` (0-based coordinates): for
/// every increasing set `A`, `P(X in A | X_i ~ x)` is nondecreasing in `x`.
pub fn is_prd(grid: &GridPmf, subset: &[usize], cond: Conditioning, tol: f64) -> Result<PrdReport> {
    is_prd_capped(grid, subset, cond, tol, DEFAULT_MAX_CELLS, DEFAULT_MAX_UPSETS)
}

pub fn is_prd_capped(
    grid: &GridPmf,
    subset: &[usize],
    cond: Conditioning,
    tol: f64,
    max_cells: usize,
    max_upsets: u64,
) -> Result<PrdReport> {
    check_subset(grid, subset)?;
    if grid.cell_count() > max_cells {
        return Err(Error::Capacity(format!(
            "{} cells exceed the cap of {max_cells}; use the sampled check",
            grid.cell_count()
        )));
    }
    let mut found = None;
    let checked = for_each_upset(&grid.shape(), max_upsets, |mask| {
        for &i in subset {
            if let Some(drop) = first_drop(grid, i, mask, cond, tol) {
                found = Some(witness(grid, i, mask, drop));
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(PrdReport { prd: found.is_none(), conditioning: cond, upsets_checked: checked, sampled: false, witness: found })
}

/// Randomized variant for grids too large to enumerate: checks `n_sets`
/// increasing sets, alternating up-closures of a few random cells with
/// half-spaces `{w . x >= t}` for random positive `w`. A pass is evidence,
/// not proof.
pub fn is_prd_sampled(
    grid: &GridPmf,
    subset: &[usize],
    cond: Conditioning,
    tol: f64,
    n_sets: u64,
    seed: u64,
) -> Result<PrdReport> {
    check_subset(grid, subset)?;
    let shape = grid.shape();
    let cells = grid.cell_count();
    let index: Vec<Vec<usize>> = (0..cells).map(|c| unflatten(c, &shape)).collect();
    let mut mask = vec![false; cells];
    for k in 0..n_sets {
        let mut rng = row_rng(seed, k);
        if k % 2 == 0 {
            let gens: Vec<&Vec<usize>> =
                (0..rng.random_range(1..=3)).map(|_| &index[rng.random_range(0..cells)]).collect();
            for (m, idx) in mask.iter_mut().zip(&index) {
                *m = gens.iter().any(|g| g.iter().zip(idx).all(|(a, b)| b >= a));
            }
        } else {
            let w: Vec<f64> = shape.iter().map(|_| rng.random::<f64>() + 1e-3).collect();
            let top: f64 = shape.iter().zip(&w).map(|(s, w)| (s - 1) as f64 * w).sum();
            let t = rng.random::<f64>() * top;
            for (m, idx) in mask.iter_mut().zip(&index) {
                *m = idx.iter().zip(&w).map(|(&a, w)| a as f64 * w).sum::<f64>() >= t;
            }
        }
        for &i in subset {
            if let Some(drop) = first_drop(grid, i, &mask, cond, tol) {
                return Ok(PrdReport {
                    prd: false,
                    conditioning: cond,
                    upsets_checked: k + 1,
                    sampled: true,
                    witness: Some(witness(grid, i, &mask, drop)),
                });
            }
        }
    }
    Ok(PrdReport { prd: true, conditioning: cond, upsets_checked: n_sets, sampled: true, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bivariate::{make_quasi_frechet, tri_atomic_quasi_independent};
    use crate::dependence::discretized_gamma_grid;
    use crate::models::GammaModel;
    use crate::partitions::SetPartition;

    /// Oracle: filter all 2^cells subsets for upward closure.
    fn brute_upsets(shape: &[usize]) -> u64 {
        let cells: usize = shape.iter().product();
        let idx: Vec<Vec<usize>> = (0..cells).map(|c| unflatten(c, shape)).collect();
        (0u64..1 << cells)
            .filter(|s| {
                (0..cells).all(|a| {
                    s >> a & 1 == 0
                        || (0..cells).all(|b| !idx[a].iter().zip(&idx[b]).all(|(x, y)| y >= x) || s >> b & 1 == 1)
                })
            })
            .count() as u64
    }

    #[test]
    fn upset_counts() {
        assert_eq!(count_upsets(&[2, 2], 100).unwrap(), 6);
        assert_eq!(count_upsets(&[3], 100).unwrap(), 4);
        assert_eq!(count_upsets(&[3, 3], 100).unwrap(), 20);
        for shape in [vec![2, 3], vec![2, 2, 2], vec![4, 3], vec![2, 2, 3]] {
            assert_eq!(count_upsets(&shape, 1 << 20).unwrap(), brute_upsets(&shape), "{shape:?}");
        }
        assert!(matches!(count_upsets(&[6, 6], 100), Err(Error::Capacity(_))));
    }

    #[test]
    fn independent_is_prd() {
        let g = GridPmf::independent(
            vec![vec![0.0, 1.0, 2.0], vec![0.0, 1.0], vec![5.0, 6.0]],
            &[vec![0.2, 0.5, 0.3], vec![0.4, 0.6], vec![0.7, 0.3]],
        )
        .unwrap();
        for cond in [Conditioning::Equal, Conditioning::AtMost] {
            assert!(is_prd(&g, &[0, 1, 2], cond, 1e-12).unwrap().prd);
        }
    }

    #[test]
    fn discretized_gamma_is_prd() {
        let m = GammaModel::new(2, vec![(SetPartition::full(2), 0.5), (SetPartition::singletons(2), 0.5)]).unwrap();
        let g = discretized_gamma_grid(&m, 3).unwrap();
        let r = is_prd(&g, &[0, 1], Conditioning::Equal, 1e-12).unwrap();
        assert!(r.prd);
        assert_eq!(r.upsets_checked, 20);
    }

    #[test]
    fn tri_atomic_not_prd() {
        let pmf = tri_atomic_quasi_independent(&[1.0 / 3.0; 3], &[1.0 / 3.0; 3], 1.0 / 9.0).unwrap();
        let g = GridPmf::from_joint(&pmf);
        let r = is_prd(&g, &[0], Conditioning::Equal, 1e-12).unwrap();
        assert!(!r.prd);
        let w = r.witness.unwrap();
        assert!(w.p_x_prime < w.p_x);
        let json = serde_json::to_value(&w).unwrap();
        for key in ["index", "upset", "x", "x_prime", "p_x", "p_x_prime"] {
            assert!(json.get(key).is_some());
        }
        assert!(!is_prd_sampled(&g, &[0], Conditioning::Equal, 1e-12, 200, 1).unwrap().prd);
    }

    #[test]
    fn exchangeable_frechet_is_prd() {
        let p = [0.1, 0.4, 0.2, 0.3];
        for r in [0.0, 0.2, 0.7, 1.0] {
            let pmf = make_quasi_frechet(vec![1.0, 2.0, 3.0, 4.0], &p, r, None).unwrap();
            let g = GridPmf::from_joint(&pmf);
            assert!(is_prd(&g, &[0, 1], Conditioning::Equal, 1e-12).unwrap().prd, "r={r}");
        }
        let neg = make_quasi_frechet(vec![1.0, 2.0, 3.0, 4.0], &p, -0.05, None).unwrap();
        assert!(!is_prd(&GridPmf::from_joint(&neg), &[0], Conditioning::Equal, 1e-12).unwrap().prd);
    }

    #[test]
    fn caps() {
        let g = GridPmf::independent(vec![vec![0.0, 1.0]; 13], &vec![vec![0.5, 0.5]; 13]).unwrap();
        assert!(matches!(is_prd(&g, &[0], Conditioning::Equal, 1e-12), Err(Error::Capacity(_))));
        assert!(is_prd_sampled(&g, &[0, 5], Conditioning::AtMost, 1e-12, 50, 3).unwrap().prd);
        assert!(is_prd(&g, &[13], Conditioning::Equal, 1e-12).is_err());
    }
}
