//! Constructive models with invariant correlation, their exact moments, and
//! seeded samplers.
//!
//! Every sampler derives one ChaCha8 stream per output row
//! (`seed_from_u64(seed)` then `set_stream(row)`), so the value of row `k`
//! depends only on `(model, seed, k)` and rows can be produced in any order
//! or in parallel.

mod checkerboard;
mod conformal;
mod copula;
mod gamma;
mod markov;
mod samples;

pub use checkerboard::Checkerboard;
pub use conformal::{
    conformal_corr, conformal_joint_pmf, conformal_pair_correlation, conformal_pmf_table, ConformalCell, ConformalSpec,
    ExactRational, CONFORMAL_EXACT_MAX,
};
pub use copula::{frechet_copula_cdf, r_frechet_cdf, FrechetPair};
pub use gamma::{model_from_membership, CommonShockModel, GammaModel};
pub use markov::MarkovModel;
pub use samples::{apply_marginal_transform, ceiling_grid, Samples};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator for output row `row` under `seed`.
pub fn row_rng(seed: u64, row: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row);
    rng
}

/// A seeded source of i.i.d. rows.
pub trait Sampler {
    fn dim(&self) -> usize;

    /// Fills one row; `rng` is the row's own stream.
    fn sample_row(&self, rng: &mut ChaCha8Rng, out: &mut [f64]);

    fn sample(&self, count: usize, seed: u64) -> Samples {
        let d = self.dim();
        let mut data = vec![0.0; count * d];
        for (k, row) in data.chunks_mut(d).enumerate() {
            let mut rng = row_rng(seed, k as u64);
            self.sample_row(&mut rng, row);
        }
        Samples::from_flat(d, data)
    }
}

/// `d` independent standard uniforms.
#[derive(Debug, Clone, Copy)]
pub struct IndependentUniform(pub usize);

impl Sampler for IndependentUniform {
    fn dim(&self) -> usize {
        self.0
    }

    fn sample_row(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        use rand::Rng;
        for v in out.iter_mut() {
            *v = rng.random();
        }
    }
}
