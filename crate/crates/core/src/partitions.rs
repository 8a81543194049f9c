//! Set partitions of `{1..d}`, Bell numbers, and clique partition points.
//!
//! Partitions are enumerated in restricted-growth-string (RGS) lexicographic
//! order. That order is the column order of the membership constraint
//! matrix, so it is part of the public contract.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the ground-set size for enumeration (`Bell(12) = 4_213_597`).
pub const DEFAULT_MAX_DIM: usize = 12;

/// A partition of `{1..d}` into nonempty, pairwise disjoint blocks.
///
/// Internally the partition is held as its restricted growth string: element
/// `i` (0-based) carries the label of its block, blocks are labelled in order
/// of their smallest element. Blocks exposed through [`SetPartition::blocks`]
/// are 1-based and canonical (sorted by smallest element, indices ascending).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    labels: Vec<usize>,
    n_blocks: usize,
}

impl SetPartition {
    /// Builds a partition from a restricted growth string.
    pub fn from_rgs(labels: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Dimension { d: 0, min: 1, max: usize::MAX });
        }
        let mut next = 0;
        for (i, &l) in labels.iter().enumerate() {
            if l > next {
                return Err(Error::validation(format!("label {l} at position {i} breaks restricted growth")));
            }
            if l == next {
                next += 1;
            }
        }
        Ok(Self { labels, n_blocks: next })
    }

    /// Builds a partition from 1-based blocks in any order.
    pub fn from_blocks(d: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension { d, min: 1, max: usize::MAX });
        }
        let mut owner: Vec<Option<usize>> = vec![None; d];
        let mut problems = Vec::new();
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                problems.push(format!("block {b} is empty"));
            }
            for &i in block {
                if i == 0 || i > d {
                    problems.push(format!("index {i} outside 1..={d}"));
                } else if owner[i - 1].replace(b).is_some() {
                    problems.push(format!("index {i} appears in more than one block"));
                }
            }
        }
        for (i, o) in owner.iter().enumerate() {
            if o.is_none() {
                problems.push(format!("index {} is not covered", i + 1));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        // Relabel blocks in order of first appearance to get the RGS.
        let mut relabel: Vec<Option<usize>> = vec![None; blocks.len()];
        let mut next = 0;
        let labels = owner
            .into_iter()
            .map(|o| {
                let b = o.expect("coverage checked");
                *relabel[b].get_or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Ok(Self { labels, n_blocks: next })
    }

    /// The partition with a single block `{1..d}`.
    pub fn full(d: usize) -> Self {
        assert!(d >= 1);
        Self { labels: vec![0; d], n_blocks: 1 }
    }

    /// The partition into singletons.
    pub fn singletons(d: usize) -> Self {
        assert!(d >= 1);
        Self { labels: (0..d).collect(), n_blocks: d }
    }

    pub fn d(&self) -> usize {
        self.labels.len()
    }

    pub fn block_count(&self) -> usize {
        self.n_blocks
    }

    /// Block label of each element (0-based elements and labels).
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Whether 0-based elements `i` and `j` share a block.
    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }

    /// Canonical 1-based blocks.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.n_blocks];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l].push(i + 1);
        }
        blocks
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (b, block) in self.blocks().iter().enumerate() {
            if b > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (k, i) in block.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{i}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    d: usize,
    blocks: Vec<Vec<usize>>,
}

impl Serialize for SetPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PartitionRepr { d: self.d(), blocks: self.blocks() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = PartitionRepr::deserialize(de)?;
        SetPartition::from_blocks(repr.d, &repr.blocks).map_err(serde::de::Error::custom)
    }
}

/// Lazy RGS-lexicographic enumeration of the partitions of `{1..d}`.
#[derive(Debug, Clone)]
pub struct Partitions {
    labels: Vec<usize>,
    // prefix_max[i] = max(labels[0..=i])
    prefix_max: Vec<usize>,
    done: bool,
}

impl Partitions {
    pub fn new(d: usize) -> Self {
        Self { labels: vec![0; d], prefix_max: vec![0; d], done: d == 0 }
    }
}

impl Iterator for Partitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let current =
            SetPartition { labels: self.labels.clone(), n_blocks: self.prefix_max.last().map_or(0, |m| m + 1) };
        // Advance: rightmost position that can still grow.
        let d = self.labels.len();
        let mut i = d;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.labels[i] <= self.prefix_max[i - 1] {
                self.labels[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.labels[i]);
                for k in i + 1..d {
                    self.labels[k] = 0;
                    self.prefix_max[k] = self.prefix_max[i];
                }
                break;
            }
        }
        Some(current)
    }
}

/// All partitions of `{1..d}` in RGS-lexicographic order, with `d <= 12`.
pub fn enumerate_partitions(d: usize) -> Result<Vec<SetPartition>> {
    enumerate_partitions_capped(d, DEFAULT_MAX_DIM)
}

pub fn enumerate_partitions_capped(d: usize, max_dim: usize) -> Result<Vec<SetPartition>> {
    if d == 0 || d > max_dim {
        return Err(Error::Dimension { d, min: 1, max: max_dim });
    }
    Ok(Partitions::new(d).collect())
}

/// Bell number via the Bell triangle, exact.
pub fn bell_number(d: usize) -> BigUint {
    if d == 0 {
        return BigUint::one();
    }
    let mut row = vec![BigUint::one()];
    for _ in 1..d {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().expect("nonempty").clone());
        for v in &row {
            let s = next.last().expect("nonempty") + v;
            next.push(s);
        }
        row = next;
    }
    row.last().cloned().unwrap_or_else(BigUint::zero)
}

/// A 0/1 symmetric matrix whose 1-pattern is a disjoint union of full blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CliquePoint {
    d: usize,
    entries: Vec<u8>,
}

impl CliquePoint {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.d + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.d).map(|r| r.iter().map(|&v| f64::from(v)).collect()).collect()
    }

    /// Upper triangle in the order `(1,2), (1,3), (2,3), (1,4), ...`.
    pub fn upper_triangle(&self) -> Vec<u8> {
        upper_pairs(self.d).map(|(i, j)| self.get(i, j)).collect()
    }

    /// Scans for `(i,j) = (j,k) = 1` with `(i,k) = 0`.
    pub fn is_transitive(&self) -> bool {
        let d = self.d;
        for i in 0..d {
            for j in 0..d {
                if self.get(i, j) == 0 {
                    continue;
                }
                for k in 0..d {
                    if self.get(j, k) == 1 && self.get(i, k) == 0 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

pub fn clique_point(partition: &SetPartition) -> CliquePoint {
    let d = partition.d();
    let mut entries = vec![0u8; d * d];
    for i in 0..d {
        for j in 0..d {
            entries[i * d + j] = u8::from(partition.same_block(i, j));
        }
    }
    CliquePoint { d, entries }
}

/// Groups indices by exact value equality.
pub fn partition_of_vector(y: &[f64]) -> Result<SetPartition> {
    if y.is_empty() {
        return Err(Error::Dimension { d: 0, min: 1, max: usize::MAX });
    }
    let mut reps: Vec<f64> = Vec::new();
    let labels = y
        .iter()
        .map(|&v| match reps.iter().position(|&r| r == v) {
            Some(l) => l,
            None => {
                reps.push(v);
                reps.len() - 1
            }
        })
        .collect();
    SetPartition::from_rgs(labels)
}

/// Upper-triangle index pairs `(i, j)`, `i < j`, 0-based, ordered column by
/// column: `(0,1), (0,2), (1,2), (0,3), ...`.
pub fn upper_pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..d).flat_map(|j| (0..j).map(move |i| (i, j)))
}
