use std::collections::VecDeque;

use super::TreeAlgError;
use crate::rng::RngState;

/// Uniform rooted labeled tree on positions `1..=n`, as a head vector.
///
/// A uniform Prüfer sequence gives a uniform free labeled tree; choosing the
/// root uniformly on top of it is uniform over all `n^(n-1)` rooted trees.
pub fn sample_uniform_rooted_labeled_tree(n: usize, rng: &mut RngState) -> Result<Vec<usize>, TreeAlgError> {
    if n == 0 {
        return Err(TreeAlgError::EmptyInput);
    }
    let code: Vec<usize> = (0..n.saturating_sub(2)).map(|_| rng.below(n)).collect();
    let adj = prufer_decode(n, &code);
    let root = rng.below(n);

    let mut heads = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                heads[v] = u + 1;
                queue.push_back(v);
            }
        }
    }
    Ok(heads)
}

/// Adjacency lists of the free tree encoded by `code` (labels `0..n`).
fn prufer_decode(n: usize, code: &[usize]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    if n == 1 {
        return adj;
    }
    let mut degree = vec![1usize; n];
    for &c in code {
        degree[c] += 1;
    }
    // Linear-time decoding: `ptr` scans for the smallest leaf, `leaf` is the
    // current one.
    let mut ptr = 0;
    while degree[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    for &c in code {
        adj[leaf].push(c);
        adj[c].push(leaf);
        degree[c] -= 1;
        if degree[c] == 1 && c < ptr {
            leaf = c;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    adj[leaf].push(n - 1);
    adj[n - 1].push(leaf);
    adj
}
