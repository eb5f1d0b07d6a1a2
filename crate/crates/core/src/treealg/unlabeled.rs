//! Counting and uniform sampling of unlabeled rooted trees
//! (the Nijenhuis–Wilf recursive method).

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;

use super::{TreeAlgError, TreeShape};
use crate::rng::RngState;

/// Number of rooted trees on `n` unlabeled vertices (OEIS A000081), with
/// `t(0) = 0`.
pub fn count_unlabeled_rooted_trees(n: usize) -> BigUint {
    if n == 0 {
        return BigUint::zero();
    }
    let mut table = CountTable::default();
    table.extend_to(n);
    table.t[n].clone()
}

#[derive(Clone, Debug, Default)]
struct CountTable {
    /// `t[m]`, index 0 unused.
    t: Vec<BigUint>,
    /// `s[k] = sum over d | k of d * t[d]`.
    s: Vec<BigUint>,
}

impl CountTable {
    fn extend_to(&mut self, n: usize) {
        if self.t.is_empty() {
            self.t = vec![BigUint::zero(), BigUint::one()];
            self.s = vec![BigUint::zero(), BigUint::one()];
        }
        while self.t.len() <= n {
            // t(m+1) = (1/m) * sum_{k=1..m} s(k) t(m+1-k)
            let m = self.t.len() - 1;
            let mut acc = BigUint::zero();
            for k in 1..=m {
                acc += &self.s[k] * &self.t[m + 1 - k];
            }
            self.t.push(acc / m);
            let k = m + 1;
            let mut sk = BigUint::zero();
            for d in (1..=k).filter(|d| k.is_multiple_of(*d)) {
                sk += &self.t[d] * d;
            }
            self.s.push(sk);
        }
    }
}

/// `(copies, size)` choices for one recursive step with cumulative weights.
#[derive(Clone, Debug)]
struct SplitTable {
    splits: Vec<(usize, usize)>,
    cumulative: Vec<BigUint>,
}

/// Uniform sampler over isomorphism classes of rooted trees. Holds the
/// counting tables so repeated draws are cheap.
#[derive(Clone, Debug, Default)]
pub struct UnlabeledTreeSampler {
    counts: CountTable,
    /// `splits[m]` for `m >= 2`.
    splits: Vec<Option<SplitTable>>,
}

impl UnlabeledTreeSampler {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_max_size(n: usize) -> Self {
        let mut s = Self::new();
        s.prepare(n);
        s
    }

    /// Largest size that [`sample_prepared`](Self::sample_prepared) accepts.
    pub fn max_size(&self) -> usize {
        self.splits.len().saturating_sub(1)
    }

    pub fn prepare(&mut self, n: usize) {
        if n <= self.max_size() {
            return;
        }
        self.counts.extend_to(n);
        let t = &self.counts.t;
        while self.splits.len() <= n {
            let m = self.splits.len();
            if m < 2 {
                self.splits.push(None);
                continue;
            }
            let mut splits = Vec::new();
            let mut cumulative = Vec::new();
            let mut acc = BigUint::zero();
            for d in 1..m {
                for j in 1..=(m - 1) / d {
                    acc += &t[d] * &t[m - j * d] * d;
                    splits.push((j, d));
                    cumulative.push(acc.clone());
                }
            }
            debug_assert_eq!(acc, &t[m] * (m - 1));
            self.splits.push(Some(SplitTable { splits, cumulative }));
        }
    }

    pub fn count(&mut self, n: usize) -> BigUint {
        self.counts.extend_to(n);
        self.counts.t[n].clone()
    }

    pub fn sample(&mut self, n: usize, rng: &mut RngState) -> Result<TreeShape, TreeAlgError> {
        self.prepare(n);
        self.sample_prepared(n, rng)
    }

    /// Sample without growing the tables; `n` must not exceed
    /// [`max_size`](Self::max_size).
    pub fn sample_prepared(&self, n: usize, rng: &mut RngState) -> Result<TreeShape, TreeAlgError> {
        if n == 0 {
            return Err(TreeAlgError::EmptyInput);
        }
        if n > self.max_size().max(1) {
            return Err(TreeAlgError::NotPrepared(n));
        }
        let parent = self.generate(n, rng);
        Ok(TreeShape::from_parents(parent).expect("generator builds trees"))
    }

    /// Parent vector with the root at vertex 0.
    fn generate(&self, m: usize, rng: &mut RngState) -> Vec<Option<usize>> {
        if m == 1 {
            return vec![None];
        }
        let table = self.splits[m].as_ref().expect("prepared");
        let total = table.cumulative.last().expect("m >= 2 has splits");
        let r = uniform_below(total, rng);
        let k = table.cumulative.partition_point(|c| c <= &r);
        let (copies, size) = table.splits[k];

        let mut tree = self.generate(m - copies * size, rng);
        let branch = self.generate(size, rng);
        for _ in 0..copies {
            let offset = tree.len();
            tree.extend(branch.iter().map(|p| Some(p.map_or(0, |p| p + offset))));
        }
        tree
    }
}

/// Uniform integer in `[0, bound)` by rejection on the bit length.
fn uniform_below(bound: &BigUint, rng: &mut RngState) -> BigUint {
    assert!(!bound.is_zero());
    let bits = bound.bits();
    let words = bits.div_ceil(64) as usize;
    let top_bits = bits - 64 * (words as u64 - 1);
    loop {
        let mut digits: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        if top_bits < 64 {
            digits[words - 1] &= (1u64 << top_bits) - 1;
        }
        let candidate = BigUint::from_slice(
            &digits
                .iter()
                .flat_map(|d| [*d as u32, (*d >> 32) as u32])
                .collect::<Vec<u32>>(),
        );
        if &candidate < bound {
            return candidate;
        }
    }
}
