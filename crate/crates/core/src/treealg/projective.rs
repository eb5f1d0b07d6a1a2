//! Projective arrangements: uniform sampling and the minimum-cost layout.

use rand::seq::SliceRandom;

use super::{Arrangement, TreeShape};
use crate::rng::RngState;

/// Uniform projective arrangement of `shape`.
///
/// At every vertex the vertex itself and the blocks of its child subtrees
/// are put in a uniformly random order, so each of the
/// `prod_v (children(v) + 1)!` projective arrangements is equally likely.
pub fn sample_projective_arrangement(shape: &TreeShape, rng: &mut RngState) -> Arrangement {
    const SELF: usize = usize::MAX;
    let size = shape.subtree_sizes();
    let mut pos = vec![0usize; shape.len()];
    let mut stack = vec![(shape.root(), 1usize)];
    let mut items = Vec::new();
    while let Some((v, start)) = stack.pop() {
        items.clear();
        items.push(SELF);
        items.extend_from_slice(shape.children(v));
        items.shuffle(rng);
        let mut cursor = start;
        for &item in &items {
            if item == SELF {
                pos[v] = cursor;
                cursor += 1;
            } else {
                stack.push((item, cursor));
                cursor += size[item];
            }
        }
    }
    Arrangement::from_positions(pos).expect("blocks tile 1..=n")
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Parent {
    None,
    Left,
    Right,
}

/// Minimum-cost projective arrangement of a rooted shape.
///
/// Children are sorted by subtree size (largest first) and dealt to
/// alternating sides, larger blocks further from the parent. A vertex whose
/// own parent lies to one side starts dealing on the opposite side, which
/// keeps the blocks crossed by the parent edge as small as possible.
pub fn min_projective_arrangement(shape: &TreeShape) -> (Arrangement, u64) {
    let size = shape.subtree_sizes();
    let mut order = Vec::with_capacity(shape.len());
    layout(shape, &size, shape.root(), Parent::None, &mut order);
    let arr = Arrangement::from_order(&order).expect("layout visits every vertex once");
    let cost = super::arrangement_cost(shape, &arr).expect("same size");
    (arr, cost)
}

fn layout(shape: &TreeShape, size: &[usize], v: usize, parent: Parent, out: &mut Vec<usize>) {
    let mut kids = shape.children(v).to_vec();
    kids.sort_by(|&a, &b| size[b].cmp(&size[a]).then(a.cmp(&b)));
    // 1st, 3rd, ... largest go away from the parent; 2nd, 4th, ... towards it
    let (away, toward): (Vec<usize>, Vec<usize>) = {
        let (a, t): (Vec<_>, Vec<_>) = kids.iter().enumerate().partition(|(i, _)| i % 2 == 0);
        (
            a.into_iter().map(|(_, &c)| c).collect(),
            t.into_iter().map(|(_, &c)| c).collect(),
        )
    };
    let (left, right) = match parent {
        Parent::None | Parent::Right => (away, toward),
        Parent::Left => (toward, away),
    };
    // left side: largest outermost, i.e. in the given order
    for &c in &left {
        layout(shape, size, c, Parent::Right, out);
    }
    out.push(v);
    for &c in right.iter().rev() {
        layout(shape, size, c, Parent::Left, out);
    }
}
