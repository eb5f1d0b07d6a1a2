//! The single prompt sent for every target sentence.

use depbase::conllu::{Sentence, Treebank, EMPTY};
use depbase::rng::RngState;
use depbase::tree::DepTree;

use crate::LlmError;

/// Lengths allowed for the worked example.
pub const EXAMPLE_LENGTHS: std::ops::RangeInclusive<usize> = 4..=7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromptSpec {
    pub example: (Sentence, DepTree),
    pub target: Sentence,
    pub rendered: String,
}

impl PromptSpec {
    pub fn new(example: (Sentence, DepTree), target: Sentence) -> Self {
        let rendered = build_prompt(&example.0, &example.1, &target);
        PromptSpec {
            example,
            target,
            rendered,
        }
    }
}

/// Uniform choice among the treebank sentences of 4 to 7 words.
pub fn pick_example(treebank: &Treebank, rng: &mut RngState) -> Result<(Sentence, DepTree), LlmError> {
    let pool: Vec<&(Sentence, DepTree)> = treebank
        .iter()
        .filter(|(_, t)| EXAMPLE_LENGTHS.contains(&t.len()))
        .collect();
    if pool.is_empty() {
        return Err(LlmError::NoExample(treebank.source.clone()));
    }
    Ok(pool[rng.below(pool.len())].clone())
}

fn bracketed(s: &Sentence) -> String {
    s.forms().collect::<Vec<_>>().join(" ")
}

/// Render the prompt: an intro line, the example with only ID, FORM, HEAD
/// and DEPREL filled, and the request for the target.
pub fn build_prompt(example: &Sentence, tree: &DepTree, target: &Sentence) -> String {
    let mut lines = vec![format!(
        "In dependency parsing the CoNLL format for the sentence <{}> is:",
        bracketed(example)
    )];
    for (i, (tok, &head)) in example.tokens.iter().zip(tree.heads()).enumerate() {
        let deprel = if tok.deprel.is_empty() {
            EMPTY
        } else {
            tok.deprel.as_str()
        };
        lines.push(format!(
            "{}\t{}\t_\t_\t_\t_\t{}\t{}\t_\t_",
            i + 1,
            tok.form,
            head,
            deprel
        ));
    }
    lines.push(format!(
        "Now return the CoNLL format for the sentence: <{}>",
        bracketed(target)
    ));
    lines.join("\n")
}
