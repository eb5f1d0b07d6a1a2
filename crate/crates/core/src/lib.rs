//! Uninformed dependency-parsing baselines, repair of model output and
//! evaluation against gold treebanks.

pub mod baselines;
pub mod conllu;
pub mod metrics;
pub mod repair;
pub mod rng;
pub mod tree;
pub mod treealg;

pub use baselines::{build_length_index, generate, BaselineKind, LengthIndex};
pub use conllu::{Sentence, Token, Treebank};
pub use metrics::{EvalReport, Percent};
pub use repair::{postprocess, RawOutput, RepairLevel};
pub use rng::RngState;
pub use tree::{validate_tree, DepTree, Verdict};
