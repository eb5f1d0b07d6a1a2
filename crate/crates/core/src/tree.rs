//! Head-vector dependency trees and validity checking.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Outcome of checking a head vector against the tree conditions.
///
/// When several conditions are violated, the first one in declaration order
/// is reported.
#[derive(Clone, Copy, Debug, Eq, Hash, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    MultiRoot,
    NoRoot,
    Cycle,
    OutOfRange,
    SelfLoop,
}

impl Verdict {
    pub fn is_valid(self) -> bool {
        self == Verdict::Valid
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Valid => "valid",
            Verdict::MultiRoot => "multi_root",
            Verdict::NoRoot => "no_root",
            Verdict::Cycle => "cycle",
            Verdict::OutOfRange => "out_of_range",
            Verdict::SelfLoop => "self_loop",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Check a head vector. `heads[i]` is the head of the token at position
/// `i + 1`; head `0` is the artificial root.
///
/// Cycle detection only follows arcs whose head is in range and not a self
/// loop, so those two classes are reported separately.
pub fn validate_tree(heads: &[usize]) -> Verdict {
    let n = heads.len();
    let roots = heads.iter().filter(|&&h| h == 0).count();
    if roots > 1 {
        return Verdict::MultiRoot;
    }
    if roots == 0 {
        return Verdict::NoRoot;
    }
    if has_cycle(heads) {
        return Verdict::Cycle;
    }
    if heads.iter().any(|&h| h > n) {
        return Verdict::OutOfRange;
    }
    if heads.iter().enumerate().any(|(i, &h)| h == i + 1) {
        return Verdict::SelfLoop;
    }
    Verdict::Valid
}

fn has_cycle(heads: &[usize]) -> bool {
    let n = heads.len();
    // 0 = unvisited, 1 = on current path, 2 = done
    let mut state = vec![0u8; n + 1];
    for start in 1..=n {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        loop {
            match state[v] {
                1 => return true,
                2 => break,
                _ => {}
            }
            state[v] = 1;
            path.push(v);
            let h = heads[v - 1];
            if h == 0 || h > n || h == v {
                break;
            }
            v = h;
        }
        for p in path {
            state[p] = 2;
        }
    }
    false
}

/// True when no two arcs cross, counting the arc from the artificial root
/// at position 0. For a valid tree this is equivalent to every subtree
/// covering a contiguous span.
pub fn is_projective(heads: &[usize]) -> bool {
    let arcs: Vec<(usize, usize)> = heads
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let d = i + 1;
            (h.min(d), h.max(d))
        })
        .collect();
    for (i, &(a, b)) in arcs.iter().enumerate() {
        for &(c, d) in &arcs[i + 1..] {
            if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid dependency tree: {0}")]
pub struct InvalidTree(pub Verdict);

/// A validated dependency tree over positions `1..=n`.
#[derive(Clone, Debug, Eq, Hash, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DepTree {
    heads: Vec<usize>,
}

impl DepTree {
    pub fn new(heads: Vec<usize>) -> Result<Self, InvalidTree> {
        match validate_tree(&heads) {
            Verdict::Valid => Ok(DepTree { heads }),
            v => Err(InvalidTree(v)),
        }
    }

    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    /// Head of the token at 1-based position `d`.
    pub fn head(&self, d: usize) -> usize {
        self.heads[d - 1]
    }

    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn into_heads(self) -> Vec<usize> {
        self.heads
    }

    /// Position of the token attached to the artificial root.
    pub fn root(&self) -> usize {
        self.heads.iter().position(|&h| h == 0).map_or(0, |i| i + 1)
    }

    /// Arcs as `(head, dependent)` pairs in dependent order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.heads.iter().enumerate().map(|(i, &h)| (h, i + 1))
    }

    pub fn is_projective(&self) -> bool {
        is_projective(&self.heads)
    }
}

impl AsRef<[usize]> for DepTree {
    fn as_ref(&self) -> &[usize] {
        &self.heads
    }
}

impl TryFrom<Vec<usize>> for DepTree {
    type Error = InvalidTree;

    fn try_from(heads: Vec<usize>) -> Result<Self, Self::Error> {
        DepTree::new(heads)
    }
}

impl From<DepTree> for Vec<usize> {
    fn from(t: DepTree) -> Self {
        t.heads
    }
}
