//! Minimum linear arrangement of free trees.
//!
//! Divide and conquer in the style of Shiloach. A free tree is rooted at its
//! centroid and the largest `q` subtrees of the root are laid out as
//! contiguous blocks alternating on both sides, largest outermost, each one
//! anchored towards the centre. What is left (the root and its smaller
//! subtrees) goes in the middle: unanchored when the edges leaving it to the
//! left and right balance, anchored towards the heavier side otherwise.
//! Anchored subproblems are handled the same way with the anchor edge
//! counted as one outer block. Every `q` is tried and subproblems are
//! memoised by vertex set.

use std::collections::HashMap;
use std::rc::Rc;

use super::{Arrangement, TreeShape};

/// Minimum linear arrangement of `shape` as a free tree, and its cost.
pub fn min_linear_arrangement(shape: &TreeShape) -> (Arrangement, u64) {
    let mut solver = Solver::new(shape);
    let all = VertexSet::full(shape.len());
    let sol = solver.free(&all);
    let arr = Arrangement::from_order(&sol.order).expect("solver lays out every vertex once");
    debug_assert_eq!(super::arrangement_cost(shape, &arr), Ok(sol.cost));
    (arr, sol.cost)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct VertexSet(Vec<u64>);

impl VertexSet {
    fn empty(n: usize) -> Self {
        VertexSet(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }

    fn remove(&mut self, v: usize) {
        self.0[v / 64] &= !(1 << (v % 64));
    }

    fn contains(&self, v: usize) -> bool {
        self.0[v / 64] & (1 << (v % 64)) != 0
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

#[derive(Debug)]
struct Solution {
    order: Vec<usize>,
    cost: u64,
}

/// A component of `S - u`: the neighbour of `u` it hangs from and its
/// vertices.
struct Branch {
    root: usize,
    set: VertexSet,
    size: usize,
}

const FREE: usize = usize::MAX;

struct Solver {
    adj: Vec<Vec<usize>>,
    memo: HashMap<(VertexSet, usize), Rc<Solution>>,
    scratch: Vec<usize>,
}

impl Solver {
    fn new(shape: &TreeShape) -> Self {
        Solver {
            adj: shape.neighbors(),
            memo: HashMap::new(),
            scratch: vec![0; shape.len()],
        }
    }

    fn free(&mut self, set: &VertexSet) -> Rc<Solution> {
        if let Some(s) = self.memo.get(&(set.clone(), FREE)) {
            return s.clone();
        }
        let u = self.centroid(set);
        let sol = Rc::new(self.split(set, u, false));
        self.memo.insert((set.clone(), FREE), sol.clone());
        sol
    }

    /// Layout of `set` with an extra edge from `u` leaving to the right; the
    /// cost includes the part of that edge inside the block.
    fn anchored(&mut self, set: &VertexSet, u: usize) -> Rc<Solution> {
        if let Some(s) = self.memo.get(&(set.clone(), u)) {
            return s.clone();
        }
        let sol = Rc::new(self.split(set, u, true));
        self.memo.insert((set.clone(), u), sol.clone());
        sol
    }

    fn split(&mut self, set: &VertexSet, u: usize, anchored: bool) -> Solution {
        let size = set.len();
        if size == 1 {
            return Solution {
                order: vec![u],
                cost: 0,
            };
        }
        let mut branches = self.branches(set, u);
        branches.sort_by(|a, b| b.size.cmp(&a.size).then(a.root.cmp(&b.root)));

        let blocks: Vec<Rc<Solution>> = branches.iter().map(|b| self.anchored(&b.set, b.root)).collect();

        let mut best: Option<Solution> = None;
        let mut rest = set.clone();
        for q in 1..=branches.len() {
            for v in branches[q - 1].set.iter() {
                rest.remove(v);
            }
            let left = q.div_ceil(2);
            let right = q / 2 + usize::from(anchored);
            let middle: Vec<usize> = if left == right {
                self.free(&rest).order.clone()
            } else if left > right {
                let mut m = self.anchored(&rest, u).order.clone();
                m.reverse();
                m
            } else {
                self.anchored(&rest, u).order.clone()
            };

            let mut order = Vec::with_capacity(size);
            for i in (0..q).step_by(2) {
                order.extend_from_slice(&blocks[i].order);
            }
            order.extend(middle);
            let mut odd: Vec<usize> = (1..q).step_by(2).collect();
            odd.reverse();
            for i in odd {
                order.extend(blocks[i].order.iter().rev());
            }

            let cost = self.cost(&order, u, anchored);
            if best.as_ref().is_none_or(|b| cost < b.cost) {
                best = Some(Solution { order, cost });
            }
        }
        best.expect("at least one branch")
    }

    fn cost(&mut self, order: &[usize], u: usize, anchored: bool) -> u64 {
        for (i, &v) in order.iter().enumerate() {
            self.scratch[v] = i;
        }
        let mut set = VertexSet::empty(self.adj.len());
        for &v in order {
            set.insert(v);
        }
        let mut cost = 0u64;
        for &v in order {
            for &w in &self.adj[v] {
                if v < w && set.contains(w) {
                    cost += self.scratch[v].abs_diff(self.scratch[w]) as u64;
                }
            }
        }
        if anchored {
            cost += (order.len() - 1 - self.scratch[u]) as u64;
        }
        cost
    }

    fn branches(&self, set: &VertexSet, u: usize) -> Vec<Branch> {
        let n = self.adj.len();
        let mut out = Vec::new();
        for &r in &self.adj[u] {
            if !set.contains(r) {
                continue;
            }
            let mut comp = VertexSet::empty(n);
            comp.insert(r);
            let mut stack = vec![(r, u)];
            let mut size = 1;
            while let Some((v, from)) = stack.pop() {
                for &w in &self.adj[v] {
                    if w != from && set.contains(w) {
                        comp.insert(w);
                        size += 1;
                        stack.push((w, v));
                    }
                }
            }
            out.push(Branch {
                root: r,
                set: comp,
                size,
            });
        }
        out
    }

    /// Vertex minimising the largest component left after removing it;
    /// lowest id on ties.
    fn centroid(&self, set: &VertexSet) -> usize {
        let total = set.len();
        let start = set.iter().next().expect("non-empty set");
        // iterative DFS order from `start` restricted to `set`
        let mut order = Vec::with_capacity(total);
        let mut parent = HashMap::with_capacity(total);
        parent.insert(start, usize::MAX);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in &self.adj[v] {
                if set.contains(w) && parent.get(&v) != Some(&w) {
                    parent.insert(w, v);
                    stack.push(w);
                }
            }
        }
        let mut sub: HashMap<usize, usize> = order.iter().map(|&v| (v, 1)).collect();
        for &v in order.iter().rev() {
            let p = parent[&v];
            if p != usize::MAX {
                let s = sub[&v];
                *sub.get_mut(&p).expect("in set") += s;
            }
        }
        let mut best = (usize::MAX, usize::MAX);
        for &v in &order {
            let mut largest = total - sub[&v];
            for &w in &self.adj[v] {
                if set.contains(w) && parent.get(&w) == Some(&v) {
                    largest = largest.max(sub[&w]);
                }
            }
            if (largest, v) < best {
                best = (largest, v);
            }
        }
        best.1
    }
}
