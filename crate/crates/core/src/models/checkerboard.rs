use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Sampler;
use crate::error::{Error, Result};

const CELL_TOL: f64 = 1e-12;

/// `C = r M + (1 - r) C_P` where `C_P` is the 3x3 checkerboard copula with
/// cell masses `P` (entries sum to 1) and `(P + P') / 2 = ones / 9`.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkerboard {
    cells: [[f64; 3]; 3],
    r: f64,
}

impl Checkerboard {
    pub fn new(cells: [[f64; 3]; 3], r: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if !(0.0..=1.0).contains(&r) {
            problems.push(format!("r = {r} outside [0, 1]"));
        }
        for i in 0..3 {
            for j in 0..3 {
                if !(cells[i][j] >= 0.0) {
                    problems.push(format!("cell ({}, {}) is {}", i + 1, j + 1, cells[i][j]));
                }
                let sym = (cells[i][j] + cells[j][i]) / 2.0;
                if j >= i && (sym - 1.0 / 9.0).abs() > CELL_TOL {
                    problems.push(format!("symmetric part at ({}, {}) is {sym}, not 1/9", i + 1, j + 1));
                }
            }
            let row: f64 = cells[i].iter().sum();
            let col: f64 = cells.iter().map(|c| c[i]).sum();
            if (row - 1.0 / 3.0).abs() > CELL_TOL || (col - 1.0 / 3.0).abs() > CELL_TOL {
                problems.push(format!("row/column {} sums are {row}, {col}; need 1/3", i + 1));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Self { cells, r })
    }

    /// The cyclic family `1/9 + eps` on `(1,2), (2,3), (3,1)` and `1/9 - eps`
    /// on the transposed cells; valid for `|eps| <= 1/9`.
    pub fn cyclic(eps: f64, r: f64) -> Result<Self> {
        let a = 1.0 / 9.0;
        Self::new([[a, a + eps, a - eps], [a - eps, a, a + eps], [a + eps, a - eps, a]], r)
    }

    pub fn cells(&self) -> &[[f64; 3]; 3] {
        &self.cells
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Exact copula value.
    pub fn cdf(&self, u: f64, v: f64) -> f64 {
        let overlap = |t: f64, k: usize| (t * 3.0 - k as f64).clamp(0.0, 1.0);
        let mut cp = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                cp += self.cells[i][j] * overlap(u, i) * overlap(v, j);
            }
        }
        self.r * u.min(v) + (1.0 - self.r) * cp
    }
}

impl Sampler for Checkerboard {
    fn dim(&self) -> usize {
        2
    }

    fn sample_row(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let pick: f64 = rng.random();
        let cell: f64 = rng.random();
        let (a, b): (f64, f64) = (rng.random(), rng.random());
        if pick < self.r {
            out[0] = a;
            out[1] = a;
            return;
        }
        let mut acc = 0.0;
        let mut chosen = (2, 2);
        'outer: for i in 0..3 {
            for j in 0..3 {
                acc += self.cells[i][j];
                if cell < acc {
                    chosen = (i, j);
                    break 'outer;
                }
            }
        }
        out[0] = (chosen.0 as f64 + a) / 3.0;
        out[1] = (chosen.1 as f64 + b) / 3.0;
    }
}
