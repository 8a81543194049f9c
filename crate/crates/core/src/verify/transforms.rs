use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::models::row_rng;

/// Which transforms count as admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Every measurable map.
    All,
    /// Nondecreasing maps only.
    Increasing,
}

/// A transform of the normalized coordinate `t` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformKind {
    Identity,
    Square,
    /// `|t - center|`.
    AbsCentered {
        center: f64,
    },
    /// `min(exp(rate t), cap)`.
    ClippedExp {
        rate: f64,
        cap: f64,
    },
    /// `1{t > threshold}`.
    HalfLine {
        threshold: f64,
    },
    /// `sum_k weights[k] 1{t > thresholds[k]}`.
    IndicatorCombination {
        thresholds: Vec<f64>,
        weights: Vec<f64>,
    },
    /// Linear interpolation through `(knots[k], values[k])`, flat outside.
    PiecewiseLinear {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
    /// `sum_k coeffs[k] (t - shift)^k`.
    Polynomial {
        coeffs: Vec<f64>,
        shift: f64,
    },
    /// Step function on `values.len()` equal bins of `[0, 1]` with sorted heights.
    SortedRandom {
        values: Vec<f64>,
    },
    /// Step function on equal bins with unconstrained heights.
    RandomStep {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub id: usize,
    #[serde(flatten)]
    pub kind: TransformKind,
    pub monotone: bool,
}

impl TransformSpec {
    pub fn new(id: usize, kind: TransformKind) -> Self {
        let monotone = kind.is_monotone();
        Self { id, kind, monotone }
    }

    pub fn apply(&self, t: f64) -> f64 {
        self.kind.apply(t)
    }

    pub fn label(&self) -> &'static str {
        self.kind.label()
    }
}

impl TransformKind {
    pub fn apply(&self, t: f64) -> f64 {
        match self {
            Self::Identity => t,
            Self::Square => t * t,
            Self::AbsCentered { center } => (t - center).abs(),
            Self::ClippedExp { rate, cap } => (rate * t).exp().min(*cap),
            Self::HalfLine { threshold } => f64::from(u8::from(t > *threshold)),
            Self::IndicatorCombination { thresholds, weights } => {
                thresholds.iter().zip(weights).map(|(th, w)| if t > *th { *w } else { 0.0 }).sum()
            }
            Self::PiecewiseLinear { knots, values } => {
                let k = knots.partition_point(|&x| x <= t);
                if k == 0 {
                    values[0]
                } else if k == knots.len() {
                    values[k - 1]
                } else {
                    let (x0, x1, y0, y1) = (knots[k - 1], knots[k], values[k - 1], values[k]);
                    y0 + (y1 - y0) * (t - x0) / (x1 - x0)
                }
            }
            Self::Polynomial { coeffs, shift } => coeffs.iter().rev().fold(0.0, |acc, c| acc * (t - shift) + c),
            Self::SortedRandom { values } | Self::RandomStep { values } => {
                let n = values.len();
                let bin = ((t * n as f64).floor() as usize).min(n - 1);
                values[bin]
            }
        }
    }

    /// Structural monotonicity of the realized map on `[0, 1]`.
    pub fn is_monotone(&self) -> bool {
        let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] <= w[1]);
        match self {
            Self::Identity | Self::HalfLine { .. } => true,
            Self::Square => true,
            Self::AbsCentered { center } => *center <= 0.0,
            Self::ClippedExp { rate, .. } => *rate >= 0.0,
            Self::IndicatorCombination { weights, .. } => weights.iter().all(|w| *w >= 0.0),
            Self::PiecewiseLinear { values, .. } | Self::SortedRandom { values } | Self::RandomStep { values } => {
                sorted(values)
            }
            Self::Polynomial { .. } => {
                // Checked on a dense grid: the library only builds odd powers
                // with positive scale for the increasing mode.
                let pts: Vec<f64> = (0..=2000).map(|k| self.apply(k as f64 / 2000.0)).collect();
                sorted(&pts)
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Square => "square",
            Self::AbsCentered { .. } => "abs_centered",
            Self::ClippedExp { .. } => "clipped_exp",
            Self::HalfLine { .. } => "half_line",
            Self::IndicatorCombination { .. } => "indicator_combination",
            Self::PiecewiseLinear { .. } => "piecewise_linear",
            Self::Polynomial { .. } => "polynomial",
            Self::SortedRandom { .. } => "sorted_random",
            Self::RandomStep { .. } => "random_step",
        }
    }
}

fn canonical(mode: Mode) -> Vec<TransformKind> {
    use TransformKind::*;
    match mode {
        Mode::All => vec![
            Identity,
            Square,
            AbsCentered { center: 0.5 },
            ClippedExp { rate: 3.0, cap: 2.0f64.exp() },
            HalfLine { threshold: 0.5 },
        ],
        Mode::Increasing => vec![
            Identity,
            HalfLine { threshold: 0.5 },
            ClippedExp { rate: 3.0, cap: 2.0f64.exp() },
            Polynomial { coeffs: vec![0.0, 0.0, 0.0, 1.0], shift: 0.5 },
        ],
    }
}

fn sorted_uniforms<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k).map(|_| rng.random()).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Sorted thresholds kept off the ends of `[0, 1]`, so that no indicator
/// hinges on a handful of extreme observations.
fn interior_thresholds<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    sorted_uniforms(rng, k).into_iter().map(|t| 0.05 + 0.9 * t).collect()
}

fn random_kind<R: Rng>(rng: &mut R, mode: Mode, slot: usize) -> TransformKind {
    use TransformKind::*;
    let k = rng.random_range(2..=5);
    match (mode, slot % 4) {
        (Mode::All, 0) => IndicatorCombination {
            thresholds: interior_thresholds(rng, k),
            weights: (0..k).map(|_| StandardNormal.sample(rng)).collect(),
        },
        (Mode::All, 1) => {
            let mut knots = sorted_uniforms(rng, k + 1);
            knots.dedup();
            let values = knots.iter().map(|_| StandardNormal.sample(rng)).collect();
            PiecewiseLinear { knots, values }
        }
        (Mode::All, 2) => {
            Polynomial { coeffs: (0..=k).map(|_| StandardNormal.sample(rng)).collect(), shift: rng.random() }
        }
        (Mode::All, _) => RandomStep { values: (0..k + 2).map(|_| rng.random()).collect() },
        (Mode::Increasing, 0) => SortedRandom { values: sorted_uniforms(rng, k + 2) },
        (Mode::Increasing, 1) => {
            let mut knots = sorted_uniforms(rng, k + 1);
            knots.dedup();
            let values = sorted_uniforms(rng, knots.len());
            PiecewiseLinear { knots, values }
        }
        (Mode::Increasing, 2) => {
            let power = 2 * rng.random_range(1..=3) + 1;
            let mut coeffs = vec![0.0; power + 1];
            coeffs[power] = 0.5 + rng.random::<f64>();
            coeffs[1] = rng.random::<f64>();
            Polynomial { coeffs, shift: rng.random() }
        }
        (Mode::Increasing, _) => IndicatorCombination {
            thresholds: interior_thresholds(rng, k),
            weights: (0..k).map(|_| 0.1 + rng.random::<f64>()).collect(),
        },
    }
}

/// `count` transforms: the canonical set first (truncated if `count` is
/// smaller), then seeded random members of the mode's families. Transform
/// `id` draws from its own stream, so a library is a prefix of any larger one.
pub fn transform_library(mode: Mode, count: usize, seed: u64) -> Vec<TransformSpec> {
    let base = canonical(mode);
    (0..count)
        .map(|id| {
            let kind = match base.get(id) {
                Some(k) => k.clone(),
                None => {
                    let mut rng = row_rng(seed, id as u64);
                    random_kind(&mut rng, mode, id - base.len())
                }
            };
            TransformSpec::new(id, kind)
        })
        .collect()
}
