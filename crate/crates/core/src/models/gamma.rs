use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Sampler;
use crate::error::{Error, Result};
use crate::partitions::{clique_point, SetPartition};
use crate::polytope::{CorrMatrix, MembershipCert, PartitionBlocks, WeightedPartition};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Law of a categorical random matrix, stored as a distribution over the set
/// partitions it induces (coordinates sharing a column share a block).
#[derive(Debug, Clone, PartialEq)]
pub struct GammaModel {
    d: usize,
    components: Vec<(SetPartition, f64)>,
    cumulative: Vec<f64>,
}

impl GammaModel {
    pub fn new(d: usize, components: Vec<(SetPartition, f64)>) -> Result<Self> {
        let mut problems = Vec::new();
        if d == 0 {
            problems.push("d must be positive".to_string());
        }
        if components.is_empty() {
            problems.push("model needs at least one component".to_string());
        }
        for (k, (p, w)) in components.iter().enumerate() {
            if p.d() != d {
                problems.push(format!("component {} has d = {}, expected {d}", k + 1, p.d()));
            }
            if !(w.is_finite() && *w >= 0.0) {
                problems.push(format!("component {} has weight {w}", k + 1));
            }
        }
        let total: f64 = components.iter().map(|c| c.1).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            problems.push(format!("weights sum to {total}, not 1"));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        let mut acc = 0.0;
        let cumulative = components
            .iter()
            .map(|c| {
                acc += c.1;
                acc
            })
            .collect();
        Ok(Self { d, components, cumulative })
    }

    /// A single partition with probability one.
    pub fn pure(partition: SetPartition) -> Self {
        let d = partition.d();
        Self::new(d, vec![(partition, 1.0)]).expect("single component")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn components(&self) -> &[(SetPartition, f64)] {
        &self.components
    }

    /// `E[Γ Γ']`: the weighted sum of clique points.
    pub fn expected_corr(&self) -> CorrMatrix {
        let d = self.d;
        let mut rows = vec![vec![0.0; d]; d];
        for (p, w) in &self.components {
            let c = clique_point(p);
            for (i, row) in rows.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v += w * f64::from(c.get(i, j));
                }
            }
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1.0;
            for v in row.iter_mut() {
                *v = v.clamp(0.0, 1.0);
            }
        }
        CorrMatrix::new(rows).expect("weighted clique points form a correlation matrix")
    }

    fn pick(&self, u: f64) -> &SetPartition {
        let target = u * self.cumulative.last().copied().unwrap_or(1.0);
        let k = self.cumulative.partition_point(|&c| c <= target);
        &self.components[k.min(self.components.len() - 1)].0
    }
}

impl Sampler for GammaModel {
    fn dim(&self) -> usize {
        self.d
    }

    /// One draw selects the partition, then one uniform per block in block order.
    fn sample_row(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let p = self.pick(rng.random());
        let u: Vec<f64> = (0..p.block_count()).map(|_| rng.random()).collect();
        for (x, &b) in out.iter_mut().zip(p.labels()) {
            *x = u[b];
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GammaModelJson {
    d: usize,
    weights: Vec<WeightedPartition>,
}

impl Serialize for GammaModel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GammaModelJson {
            d: self.d,
            weights: self
                .components
                .iter()
                .map(|(p, w)| WeightedPartition { partition: PartitionBlocks::from(p), alpha: *w })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GammaModel {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = GammaModelJson::deserialize(de)?;
        let comps = raw
            .weights
            .iter()
            .map(|w| Ok((SetPartition::from_blocks(raw.d, &w.partition.blocks)?, w.alpha)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        GammaModel::new(raw.d, comps).map_err(serde::de::Error::custom)
    }
}

/// The mixture model realizing a member certificate.
pub fn model_from_membership(cert: &MembershipCert) -> Result<GammaModel> {
    if !cert.member {
        return Err(Error::Structure("certificate is not a member".into()));
    }
    let comps = cert.partitions()?;
    let d = comps.first().map(|c| c.0.d()).ok_or_else(|| Error::Structure("certificate has no weights".into()))?;
    // Certificates are renormalized already; absorb any last-bit drift.
    let total: f64 = comps.iter().map(|c| c.1).sum();
    let comps = comps.into_iter().map(|(p, w)| (p, w / total)).collect();
    GammaModel::new(d, comps)
}

/// Γ with independent categorical rows: row `i` puts its one on column `c`
/// with probability `probs[i][c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonShockModel {
    probs: Vec<Vec<f64>>,
}

/// Largest `k^d` the exact enumeration will visit.
const CATEGORICAL_ENUM_MAX: usize = 1 << 20;

impl CommonShockModel {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        let k = probs.first().map_or(0, Vec::len);
        let mut problems = Vec::new();
        if probs.is_empty() || k == 0 {
            problems.push("need at least one row and one column".to_string());
        }
        for (i, row) in probs.iter().enumerate() {
            if row.len() != k {
                problems.push(format!("row {} has {} columns, expected {k}", i + 1, row.len()));
            }
            if row.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                problems.push(format!("row {} has a negative or non-finite entry", i + 1));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > WEIGHT_SUM_TOL {
                problems.push(format!("row {} sums to {s}", i + 1));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Self { probs })
    }

    /// `k = d + 1`: coordinate `i` takes the shared uniform with probability
    /// `shock[i]` and its own otherwise.
    pub fn common_shock(shock: &[f64]) -> Result<Self> {
        let d = shock.len();
        if shock.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::validation("shock probabilities must lie in [0, 1]"));
        }
        let probs = (0..d)
            .map(|i| {
                let mut row = vec![0.0; d + 1];
                row[i] = 1.0 - shock[i];
                row[d] = shock[i];
                row
            })
            .collect();
        Self::new(probs)
    }

    pub fn d(&self) -> usize {
        self.probs.len()
    }

    pub fn k(&self) -> usize {
        self.probs[0].len()
    }

    /// `sum_c probs[i][c] probs[j][c]` off the diagonal.
    pub fn pairwise_corr(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 1.0;
        }
        self.probs[i].iter().zip(&self.probs[j]).map(|(a, b)| a * b).sum()
    }

    /// Exact induced partition law, by enumerating every column assignment
    /// with positive probability.
    pub fn gamma_model(&self) -> Result<GammaModel> {
        let d = self.d();
        let support: Vec<Vec<(usize, f64)>> =
            self.probs.iter().map(|row| row.iter().copied().enumerate().filter(|e| e.1 > 0.0).collect()).collect();
        let count = support.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.len()));
        if count.is_none_or(|c| c > CATEGORICAL_ENUM_MAX) {
            return Err(Error::Capacity(format!("more than {CATEGORICAL_ENUM_MAX} column assignments")));
        }
        let mut law: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let mut idx = vec![0usize; d];
        loop {
            let cols: Vec<usize> = (0..d).map(|i| support[i][idx[i]].0).collect();
            let prob: f64 = (0..d).map(|i| support[i][idx[i]].1).product();
            *law.entry(rgs_of(&cols)).or_insert(0.0) += prob;
            let mut i = 0;
            while i < d {
                idx[i] += 1;
                if idx[i] < support[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == d {
                break;
            }
        }
        let total: f64 = law.values().sum();
        let comps = law
            .into_iter()
            .map(|(labels, w)| Ok((SetPartition::from_rgs(labels)?, w / total)))
            .collect::<Result<Vec<_>>>()?;
        GammaModel::new(d, comps)
    }
}

fn rgs_of(cols: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    cols.iter()
        .map(|c| match seen.iter().position(|s| s == c) {
            Some(p) => p,
            None => {
                seen.push(*c);
                seen.len() - 1
            }
        })
        .collect()
}

impl Sampler for CommonShockModel {
    fn dim(&self) -> usize {
        self.d()
    }

    /// Draws one column per row, then one uniform per column, as in `X = Γ U`.
    fn sample_row(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let cols: Vec<usize> = self
            .probs
            .iter()
            .map(|row| {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = row.len() - 1;
                for (c, p) in row.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        pick = c;
                        break;
                    }
                }
                pick
            })
            .collect();
        let u: Vec<f64> = (0..self.k()).map(|_| rng.random()).collect();
        for (x, c) in out.iter_mut().zip(cols) {
            *x = u[c];
        }
    }
}
