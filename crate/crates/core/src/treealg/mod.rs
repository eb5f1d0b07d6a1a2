//! Combinatorial algorithms on rooted trees and their linear arrangements.

mod labeled;
mod mla;
mod projective;
mod unlabeled;

pub use labeled::sample_uniform_rooted_labeled_tree;
pub use mla::min_linear_arrangement;
pub use projective::{min_projective_arrangement, sample_projective_arrangement};
pub use unlabeled::{count_unlabeled_rooted_trees, UnlabeledTreeSampler};

use thiserror::Error;

use crate::rng::RngState;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeAlgError {
    #[error("tree size must be at least 1")]
    EmptyInput,
    #[error("arrangement covers {arrangement} vertices but the shape has {shape}")]
    SizeMismatch { shape: usize, arrangement: usize },
    #[error("not a rooted tree: {0}")]
    InvalidShape(&'static str),
    #[error("not a permutation of 1..=n")]
    InvalidArrangement,
    #[error("sampler tables not prepared for size {0}")]
    NotPrepared(usize),
}

/// A rooted tree on vertices `0..n` with no linear order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeShape {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl TreeShape {
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self, TreeAlgError> {
        let n = parent.len();
        if n == 0 {
            return Err(TreeAlgError::EmptyInput);
        }
        let mut root = None;
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            match *p {
                None if root.is_some() => return Err(TreeAlgError::InvalidShape("several roots")),
                None => root = Some(v),
                Some(p) if p >= n || p == v => return Err(TreeAlgError::InvalidShape("parent out of range")),
                Some(p) => children[p].push(v),
            }
        }
        let root = root.ok_or(TreeAlgError::InvalidShape("no root"))?;
        let shape = TreeShape { parent, children, root };
        if shape.preorder().len() != n {
            return Err(TreeAlgError::InvalidShape("cycle"));
        }
        Ok(shape)
    }

    /// Shape of a valid head vector: vertex `i` is sentence position `i + 1`.
    pub fn from_heads(heads: &[usize]) -> Result<Self, TreeAlgError> {
        let parent = heads.iter().map(|&h| if h == 0 { None } else { Some(h - 1) }).collect();
        TreeShape::from_parents(parent)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (p, v)))
    }

    /// Vertices in depth-first preorder from the root.
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        let mut seen = vec![false; self.len()];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            order.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        order
    }

    /// Sizes of the subtree under every vertex.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1usize; self.len()];
        for &v in self.preorder().iter().rev() {
            if let Some(p) = self.parent[v] {
                size[p] += size[v];
            }
        }
        size
    }

    /// Undirected adjacency lists.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for (p, v) in self.edges() {
            adj[p].push(v);
            adj[v].push(p);
        }
        adj
    }

    pub fn path(n: usize) -> Self {
        let parent = (0..n).map(|v| v.checked_sub(1)).collect();
        TreeShape::from_parents(parent).expect("path is a tree")
    }

    pub fn star(n: usize) -> Self {
        let parent = (0..n).map(|v| if v == 0 { None } else { Some(0) }).collect();
        TreeShape::from_parents(parent).expect("star is a tree")
    }

    /// AHU-style canonical string: equal for isomorphic rooted trees.
    pub fn canonical_form(&self) -> String {
        fn enc(shape: &TreeShape, v: usize) -> String {
            let mut parts: Vec<String> = shape.children[v].iter().map(|&c| enc(shape, c)).collect();
            parts.sort();
            format!("({})", parts.concat())
        }
        enc(self, self.root)
    }
}

/// A bijection from shape vertices to positions `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrangement {
    pos: Vec<usize>,
    vertex_at: Vec<usize>,
}

impl Arrangement {
    /// From `pos[v]` = 1-based position of vertex `v`.
    pub fn from_positions(pos: Vec<usize>) -> Result<Self, TreeAlgError> {
        let n = pos.len();
        let mut vertex_at = vec![usize::MAX; n];
        for (v, &p) in pos.iter().enumerate() {
            if p == 0 || p > n || vertex_at[p - 1] != usize::MAX {
                return Err(TreeAlgError::InvalidArrangement);
            }
            vertex_at[p - 1] = v;
        }
        Ok(Arrangement { pos, vertex_at })
    }

    /// From the left-to-right sequence of vertices.
    pub fn from_order(order: &[usize]) -> Result<Self, TreeAlgError> {
        let n = order.len();
        let mut pos = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n || pos[v] != 0 {
                return Err(TreeAlgError::InvalidArrangement);
            }
            pos[v] = i + 1;
        }
        Ok(Arrangement {
            pos,
            vertex_at: order.to_vec(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Arrangement {
            pos: (1..=n).collect(),
            vertex_at: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    pub fn position(&self, v: usize) -> usize {
        self.pos[v]
    }

    pub fn positions(&self) -> &[usize] {
        &self.pos
    }

    /// Vertex at 1-based position `p`.
    pub fn vertex_at(&self, p: usize) -> usize {
        self.vertex_at[p - 1]
    }

    pub fn order(&self) -> &[usize] {
        &self.vertex_at
    }
}

fn check_sizes(shape: &TreeShape, arr: &Arrangement) -> Result<(), TreeAlgError> {
    if shape.len() != arr.len() {
        return Err(TreeAlgError::SizeMismatch {
            shape: shape.len(),
            arrangement: arr.len(),
        });
    }
    Ok(())
}

/// Sum of edge lengths `|pos(u) - pos(v)|`.
pub fn arrangement_cost(shape: &TreeShape, arr: &Arrangement) -> Result<u64, TreeAlgError> {
    check_sizes(shape, arr)?;
    Ok(shape
        .edges()
        .map(|(u, v)| arr.position(u).abs_diff(arr.position(v)) as u64)
        .sum())
}

/// Head vector of the shape laid out by `arr`; the shape root becomes the
/// sentence root.
pub fn linearize(shape: &TreeShape, arr: &Arrangement) -> Result<Vec<usize>, TreeAlgError> {
    check_sizes(shape, arr)?;
    let mut heads = vec![0usize; shape.len()];
    for v in 0..shape.len() {
        heads[arr.position(v) - 1] = shape.parent(v).map_or(0, |p| arr.position(p));
    }
    Ok(heads)
}

/// Inverse of [`linearize`] for a valid head vector: the identity
/// arrangement over the shape whose vertex `i` is position `i + 1`.
pub fn decompose(heads: &[usize]) -> Result<(TreeShape, Arrangement), TreeAlgError> {
    let shape = TreeShape::from_heads(heads)?;
    let arr = Arrangement::identity(heads.len());
    Ok((shape, arr))
}

/// Whether every subtree occupies a contiguous block of positions.
pub fn is_projective_arrangement(shape: &TreeShape, arr: &Arrangement) -> bool {
    let n = shape.len();
    let mut lo = vec![usize::MAX; n];
    let mut hi = vec![0usize; n];
    let size = shape.subtree_sizes();
    for &v in shape.preorder().iter().rev() {
        let p = arr.position(v);
        lo[v] = lo[v].min(p);
        hi[v] = hi[v].max(p);
        if let Some(u) = shape.parent(v) {
            lo[u] = lo[u].min(lo[v]);
            hi[u] = hi[u].max(hi[v]);
        }
    }
    (0..n).all(|v| hi[v] - lo[v] + 1 == size[v])
}

/// Sample a uniform unlabeled rooted shape of size `n`. Builds the counting
/// table on every call; reuse an [`UnlabeledTreeSampler`] for many draws.
pub fn sample_uniform_unlabeled_rooted_tree(n: usize, rng: &mut RngState) -> Result<TreeShape, TreeAlgError> {
    UnlabeledTreeSampler::new().sample(n, rng)
}
