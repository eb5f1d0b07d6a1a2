//! Inputs shared by the benchmarks.

use depbase::rng::RngState;
use depbase::treealg::{sample_uniform_rooted_labeled_tree, TreeShape, UnlabeledTreeSampler};

/// Sentence lengths the benchmarks sweep over.
pub const LENGTHS: [usize; 4] = [10, 25, 50, 100];

/// A fixed batch of uniform unlabeled shapes of size `n`.
pub fn shapes(n: usize, count: usize, seed: u64) -> Vec<TreeShape> {
    let mut sampler = UnlabeledTreeSampler::new();
    let mut rng = RngState::new(seed);
    (0..count).map(|_| sampler.sample(n, &mut rng).unwrap()).collect()
}

/// A model answer for `n` words: gold-looking rows with random heads,
/// an extra column on every third row, wrapped in chatter.
pub fn noisy_answer(n: usize, seed: u64) -> String {
    let mut rng = RngState::new(seed);
    let heads = sample_uniform_rooted_labeled_tree(n, &mut rng).unwrap();
    let mut out = String::from("Here is the analysis:\n\n");
    for (i, h) in heads.iter().enumerate() {
        let h = if rng.below(5) == 0 { rng.below(n + 1) } else { *h };
        let extra = if i % 3 == 0 { "\t_" } else { "" };
        out.push_str(&format!(
            "{}\tw{}\t_\tNOUN\t_\t_\t{h}\tdep\t_\t_{extra}\n",
            i + 1,
            i + 1
        ));
    }
    out.push_str("\nLet me know if you need anything else.");
    out
}
