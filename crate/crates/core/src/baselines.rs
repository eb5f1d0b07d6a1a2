//! Uninformed baseline parsers: trees built from the sentence length alone
//! (and, for sampling, a reference treebank).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conllu::Treebank;
use crate::repair::repair_tree;
use crate::rng::RngState;
use crate::tree::DepTree;
use crate::treealg::{
    linearize, min_linear_arrangement, min_projective_arrangement, sample_projective_arrangement,
    sample_uniform_rooted_labeled_tree, TreeShape, UnlabeledTreeSampler,
};

/// Relation label carried by every baseline arc.
pub const BASELINE_DEPREL: &str = "dep";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaselineKind {
    /// Every word attached to one uniformly chosen root.
    A,
    /// Each word depends on the previous one.
    R,
    /// Each word depends on the next one.
    L,
    /// Uniform random labeled rooted tree.
    RD,
    /// Uniform shape, uniform projective layout.
    #[serde(rename = "RD*", alias = "RDstar")]
    RDstar,
    /// Uniform shape, minimum linear arrangement.
    LI,
    /// Uniform shape, minimum projective arrangement.
    #[serde(rename = "LI*", alias = "LIstar")]
    LIstar,
    /// Tree drawn from a reference treebank.
    S,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 8] = [
        BaselineKind::A,
        BaselineKind::R,
        BaselineKind::L,
        BaselineKind::RD,
        BaselineKind::RDstar,
        BaselineKind::LI,
        BaselineKind::LIstar,
        BaselineKind::S,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::A => "A",
            BaselineKind::R => "R",
            BaselineKind::L => "L",
            BaselineKind::RD => "RD",
            BaselineKind::RDstar => "RD*",
            BaselineKind::LI => "LI",
            BaselineKind::LIstar => "LI*",
            BaselineKind::S => "S",
        }
    }

    pub fn is_deterministic(self) -> bool {
        matches!(self, BaselineKind::R | BaselineKind::L)
    }

    fn uses_shape(self) -> bool {
        matches!(self, BaselineKind::RDstar | BaselineKind::LI | BaselineKind::LIstar)
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown baseline {0:?}")]
pub struct UnknownBaseline(pub String);

impl FromStr for BaselineKind {
    type Err = UnknownBaseline;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let k = match s {
            "A" => BaselineKind::A,
            "R" => BaselineKind::R,
            "L" => BaselineKind::L,
            "RD" => BaselineKind::RD,
            "RD*" | "RDstar" => BaselineKind::RDstar,
            "LI" => BaselineKind::LI,
            "LI*" | "LIstar" => BaselineKind::LIstar,
            "S" => BaselineKind::S,
            _ => return Err(UnknownBaseline(s.to_string())),
        };
        Ok(k)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BaselineError {
    #[error("sentence length must be at least 1")]
    EmptySentence,
    #[error("the sampling baseline needs a length index")]
    MissingIndex,
    #[error("the length index is empty")]
    EmptyIndex,
}

/// Gold head vectors of a reference treebank grouped by length, with
/// multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LengthIndex {
    by_len: BTreeMap<usize, Vec<DepTree>>,
}

impl LengthIndex {
    pub fn insert(&mut self, tree: DepTree) {
        self.by_len.entry(tree.len()).or_default().push(tree);
    }

    pub fn get(&self, n: usize) -> Option<&[DepTree]> {
        self.by_len.get(&n).map(Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.by_len.is_empty()
    }

    /// Total number of stored trees.
    pub fn len(&self) -> usize {
        self.by_len.values().map(Vec::len).sum()
    }

    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_len.keys().copied()
    }

    /// Populated length closest to `n`, the smaller one on ties.
    pub fn nearest(&self, n: usize) -> Option<usize> {
        let below = self.by_len.range(..=n).next_back().map(|(&k, _)| k);
        let above = self.by_len.range(n..).next().map(|(&k, _)| k);
        match (below, above) {
            (Some(b), Some(a)) => Some(if n - b <= a - n { b } else { a }),
            (b, a) => b.or(a),
        }
    }
}

impl FromIterator<DepTree> for LengthIndex {
    fn from_iter<I: IntoIterator<Item = DepTree>>(iter: I) -> Self {
        let mut index = LengthIndex::default();
        for t in iter {
            index.insert(t);
        }
        index
    }
}

pub fn build_length_index(treebank: &Treebank) -> LengthIndex {
    treebank.trees().cloned().collect()
}

/// A generated tree. `fallback_length` is set when the sampling baseline had
/// no reference tree of the requested length and adapted one of that length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub tree: DepTree,
    pub fallback_length: Option<usize>,
}

impl Generated {
    fn exact(heads: Vec<usize>) -> Self {
        Generated {
            tree: DepTree::new(heads).expect("baselines build valid trees"),
            fallback_length: None,
        }
    }
}

/// Baseline generator that keeps the shape-counting tables and the length
/// index across calls.
#[derive(Clone, Debug, Default)]
pub struct BaselineGenerator {
    sampler: UnlabeledTreeSampler,
    index: Option<LengthIndex>,
}

impl BaselineGenerator {
    pub fn new(index: Option<LengthIndex>) -> Self {
        BaselineGenerator {
            sampler: UnlabeledTreeSampler::new(),
            index,
        }
    }

    pub fn index(&self) -> Option<&LengthIndex> {
        self.index.as_ref()
    }

    /// Grow the shape tables so sentences up to `n` need no further work.
    pub fn prepare(&mut self, n: usize) {
        self.sampler.prepare(n);
    }

    pub fn generate(&mut self, kind: BaselineKind, n: usize, rng: &mut RngState) -> Result<Generated, BaselineError> {
        if kind.uses_shape() {
            self.sampler.prepare(n);
        }
        generate_with(kind, n, rng, self.index.as_ref(), &self.sampler)
    }
}

/// Generate one baseline tree of length `n`.
pub fn generate(
    kind: BaselineKind,
    n: usize,
    rng: &mut RngState,
    index: Option<&LengthIndex>,
) -> Result<Generated, BaselineError> {
    let sampler = if kind.uses_shape() {
        UnlabeledTreeSampler::with_max_size(n)
    } else {
        UnlabeledTreeSampler::new()
    };
    generate_with(kind, n, rng, index, &sampler)
}

fn generate_with(
    kind: BaselineKind,
    n: usize,
    rng: &mut RngState,
    index: Option<&LengthIndex>,
    sampler: &UnlabeledTreeSampler,
) -> Result<Generated, BaselineError> {
    if n == 0 {
        return Err(BaselineError::EmptySentence);
    }
    let shape = |rng: &mut RngState| -> TreeShape { sampler.sample_prepared(n, rng).expect("tables prepared for n") };
    let heads = match kind {
        BaselineKind::A => {
            let root = rng.below(n) + 1;
            (1..=n).map(|d| if d == root { 0 } else { root }).collect()
        }
        BaselineKind::R => (0..n).collect(),
        BaselineKind::L => (1..=n).map(|d| if d == n { 0 } else { d + 1 }).collect(),
        BaselineKind::RD => sample_uniform_rooted_labeled_tree(n, rng).expect("n >= 1"),
        BaselineKind::RDstar => {
            let s = shape(rng);
            let arr = sample_projective_arrangement(&s, rng);
            linearize(&s, &arr).expect("same size")
        }
        BaselineKind::LI => {
            let s = shape(rng);
            let (arr, _) = min_linear_arrangement(&s);
            linearize(&s, &arr).expect("same size")
        }
        BaselineKind::LIstar => {
            let s = shape(rng);
            let (arr, _) = min_projective_arrangement(&s);
            linearize(&s, &arr).expect("same size")
        }
        BaselineKind::S => return sample_reference(n, rng, index.ok_or(BaselineError::MissingIndex)?),
    };
    Ok(Generated::exact(heads))
}

fn sample_reference(n: usize, rng: &mut RngState, index: &LengthIndex) -> Result<Generated, BaselineError> {
    if let Some(trees) = index.get(n) {
        let t = &trees[rng.below(trees.len())];
        return Ok(Generated {
            tree: t.clone(),
            fallback_length: None,
        });
    }
    let m = index.nearest(n).ok_or(BaselineError::EmptyIndex)?;
    let trees = index.get(m).expect("nearest length is populated");
    let source = trees[rng.below(trees.len())].heads();
    // truncate, or extend by attaching extra words to the reference root;
    // clamp heads into range, then repair
    let root = source.iter().position(|&h| h == 0).map_or(0, |r| r + 1);
    let adapted: Vec<i64> = (0..n)
        .map(|i| source.get(i).map_or(root, |&h| h.min(n)) as i64)
        .collect();
    let (heads, _) = repair_tree(&adapted, rng);
    Ok(Generated {
        tree: DepTree::new(heads).expect("repair yields a valid tree"),
        fallback_length: Some(m),
    })
}
