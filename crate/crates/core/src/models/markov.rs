use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::gamma::GammaModel;
use super::Sampler;
use crate::error::{Error, Result};
use crate::partitions::SetPartition;

/// Largest `d` for which the interval-partition law is enumerated.
pub const MARKOV_EXACT_MAX_DIM: usize = 20;

/// `X_1 = Y_1`; `X_i = X_{i-1}` with probability `stay[i-1]`, otherwise a
/// fresh uniform `Y_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovModel {
    stay: Vec<f64>,
}

impl MarkovModel {
    pub fn new(stay: Vec<f64>) -> Result<Self> {
        if stay.is_empty() {
            return Err(Error::Dimension { d: 1, min: 2, max: usize::MAX });
        }
        let bad: Vec<String> = stay
            .iter()
            .enumerate()
            .filter(|(_, p)| !(0.0..=1.0).contains(*p))
            .map(|(i, p)| format!("stay probability {} is {p}, outside [0, 1]", i + 1))
            .collect();
        if !bad.is_empty() {
            return Err(Error::Validation(bad));
        }
        Ok(Self { stay })
    }

    pub fn d(&self) -> usize {
        self.stay.len() + 1
    }

    pub fn stay_probs(&self) -> &[f64] {
        &self.stay
    }

    /// `prod_{l=i}^{j-1} stay[l]` (0-based, `i <= j`).
    pub fn pairwise_corr(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.stay[i..j].iter().product()
    }

    /// The induced law over interval partitions: one pattern per subset of
    /// the `d - 1` links, zero-probability patterns dropped.
    pub fn gamma_model(&self) -> Result<GammaModel> {
        let d = self.d();
        if d > MARKOV_EXACT_MAX_DIM {
            return Err(Error::Dimension { d, min: 2, max: MARKOV_EXACT_MAX_DIM });
        }
        let mut comps = Vec::new();
        for mask in 0u64..1 << (d - 1) {
            let mut prob = 1.0;
            let mut labels = vec![0usize; d];
            for l in 0..d - 1 {
                let linked = mask >> l & 1 == 1;
                prob *= if linked { self.stay[l] } else { 1.0 - self.stay[l] };
                labels[l + 1] = if linked { labels[l] } else { labels[l] + 1 };
            }
            if prob > 0.0 {
                comps.push((SetPartition::from_rgs(labels)?, prob));
            }
        }
        let total: f64 = comps.iter().map(|c| c.1).sum();
        for c in comps.iter_mut() {
            c.1 /= total;
        }
        GammaModel::new(d, comps)
    }
}

impl Sampler for MarkovModel {
    fn dim(&self) -> usize {
        self.d()
    }

    fn sample_row(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        out[0] = rng.random();
        for (i, &p) in self.stay.iter().enumerate() {
            let stay = rng.random::<f64>() < p;
            let fresh: f64 = rng.random();
            out[i + 1] = if stay { out[i] } else { fresh };
        }
    }
}
