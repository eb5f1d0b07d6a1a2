//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the code paths it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;

use depbase::treealg::{Arrangement, TreeShape};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// One representative per isomorphism class of rooted trees on `n`
/// vertices, keyed by canonical form. Built from every parent vector with
/// `parent[v] < v`.
pub fn rooted_shapes(n: usize) -> Vec<TreeShape> {
    let mut classes: BTreeMap<String, TreeShape> = BTreeMap::new();
    let mut parent = vec![0usize; n];
    loop {
        let parents: Vec<Option<usize>> = (0..n).map(|v| if v == 0 { None } else { Some(parent[v]) }).collect();
        let shape = TreeShape::from_parents(parents).unwrap();
        classes.entry(canonical(&shape, shape.root())).or_insert(shape);
        // odometer over parent[v] in 0..v
        let mut v = n;
        loop {
            if v <= 1 {
                return classes.into_values().collect();
            }
            v -= 1;
            if parent[v] + 1 < v {
                parent[v] += 1;
                parent[v + 1..].fill(0);
                break;
            }
        }
    }
}

/// Independent AHU encoding.
pub fn canonical(shape: &TreeShape, v: usize) -> String {
    let mut parts: Vec<String> = shape.children(v).iter().map(|&c| canonical(shape, c)).collect();
    parts.sort();
    format!("[{}]", parts.join(""))
}

/// Every permutation of `0..n` as a left-to-right vertex order (Heap's
/// algorithm).
pub fn for_each_order(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

pub fn order_cost(shape: &TreeShape, order: &[usize]) -> u64 {
    let mut pos = vec![0usize; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    shape
        .parents()
        .iter()
        .enumerate()
        .filter_map(|(v, p)| p.map(|p| pos[p].abs_diff(pos[v]) as u64))
        .sum()
}

/// Projective in the dependency sense: no two arcs cross, counting an arc
/// from position 0 to the root.
pub fn order_is_projective(shape: &TreeShape, order: &[usize]) -> bool {
    let mut pos = vec![0usize; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i + 1;
    }
    let arcs: Vec<(usize, usize)> = shape
        .parents()
        .iter()
        .enumerate()
        .map(|(v, p)| {
            let h = p.map_or(0, |p| pos[p]);
            (h.min(pos[v]), h.max(pos[v]))
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

/// `(free minimum, projective minimum)` over all `n!` orders.
pub fn brute_force_minima(shape: &TreeShape) -> (u64, u64) {
    let mut free = u64::MAX;
    let mut proj = u64::MAX;
    for_each_order(shape.len(), |order| {
        let c = order_cost(shape, order);
        free = free.min(c);
        if c < proj && order_is_projective(shape, order) {
            proj = c;
        }
    });
    (free, proj)
}

pub fn arrangement_of(order: &[usize]) -> Arrangement {
    Arrangement::from_order(order).unwrap()
}

/// Pearson statistic and whether it is below the `1 - alpha` quantile.
pub fn chi_square_accepts(observed: &[u64], expected_probs: &[f64], alpha: f64) -> (f64, f64, bool) {
    assert_eq!(observed.len(), expected_probs.len());
    let total: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(expected_probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = (observed.len() - 1) as f64;
    let critical = ChiSquared::new(df).unwrap().inverse_cdf(1.0 - alpha);
    (stat, critical, stat <= critical)
}

/// Every head vector in `[0, n]^n` that forms a valid tree, by direct
/// parent-following.
pub fn all_valid_head_vectors(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = (n + 1).pow(n as u32);
    for mut code in 0..total {
        let mut heads = vec![0usize; n];
        for h in heads.iter_mut() {
            *h = code % (n + 1);
            code /= n + 1;
        }
        if heads.iter().filter(|&&h| h == 0).count() != 1 {
            continue;
        }
        let ok = (1..=n).all(|start| {
            let mut v = start;
            for _ in 0..=n {
                let h = heads[v - 1];
                if h == 0 {
                    return true;
                }
                if h == v {
                    return false;
                }
                v = h;
            }
            false
        });
        if ok {
            out.push(heads);
        }
    }
    out
}

/// No two arcs cross, the root arc from position 0 included.
pub fn heads_projective(heads: &[usize]) -> bool {
    let arcs: Vec<(usize, usize)> = heads
        .iter()
        .enumerate()
        .map(|(i, &h)| (h.min(i + 1), h.max(i + 1)))
        .collect();
    for &(a, b) in &arcs {
        for &(c, d) in &arcs {
            if a < c && c < b && b < d {
                return false;
            }
        }
    }
    true
}
