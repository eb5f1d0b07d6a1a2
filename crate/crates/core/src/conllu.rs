//! Reader and writer for 10-column CoNLL-U files.
//!
//! Multiword-token lines (`3-4`) and empty nodes (`3.1`) are kept verbatim
//! so that files round-trip, but they do not take part in the tree: only
//! syntactic words with integer ids are indexed.

use std::fmt::Write as _;

use thiserror::Error;

use crate::tree::{validate_tree, DepTree, Verdict};

pub const COLUMNS: usize = 10;
pub const EMPTY: &str = "_";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConlluError {
    #[error("line {line}: expected {COLUMNS} tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: malformed token id {id:?}")]
    BadId { line: usize, id: String },
    #[error("line {line}: malformed head {head:?}")]
    BadHead { line: usize, head: String },
    #[error("sentence {sentence}: token ids are not 1..n in order")]
    IdSequence { sentence: String },
    #[error("sentence {sentence}: token {token} has no head")]
    MissingHead { sentence: String, token: usize },
    #[error("sentence {sentence}: invalid tree ({verdict})")]
    InvalidTree { sentence: String, verdict: Verdict },
}

/// One syntactic word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    pub head: Option<usize>,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl Token {
    /// A token with every column except ID and FORM set to `_`.
    pub fn new(id: usize, form: impl Into<String>) -> Self {
        Token {
            id,
            form: form.into(),
            lemma: EMPTY.into(),
            upos: EMPTY.into(),
            xpos: EMPTY.into(),
            feats: EMPTY.into(),
            head: None,
            deprel: EMPTY.into(),
            deps: EMPTY.into(),
            misc: EMPTY.into(),
        }
    }

    pub fn with_head(mut self, head: usize, deprel: impl Into<String>) -> Self {
        self.head = Some(head);
        self.deprel = deprel.into();
        self
    }

    fn write_line(&self, out: &mut String) {
        let head = self.head.map_or_else(|| EMPTY.to_string(), |h| h.to_string());
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.id, self.form, self.lemma, self.upos, self.xpos, self.feats, head, self.deprel, self.deps, self.misc
        );
    }
}

/// A sentence: comments, syntactic words, and any verbatim multiword or
/// empty-node lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sentence {
    pub comments: Vec<String>,
    pub tokens: Vec<Token>,
    /// `(k, line)`: the line is written before the token with index `k`
    /// (0-based; `k == tokens.len()` means after the last token).
    pub extra_lines: Vec<(usize, String)>,
}

impl Sentence {
    /// Build a plain sentence from word forms.
    pub fn from_forms<S: AsRef<str>>(forms: &[S]) -> Self {
        Sentence {
            tokens: forms
                .iter()
                .enumerate()
                .map(|(i, f)| Token::new(i + 1, f.as_ref()))
                .collect(),
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.form.as_str())
    }

    /// The `# sent_id = ...` value, if present.
    pub fn sent_id(&self) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let rest = c.strip_prefix('#')?.trim_start();
            let rest = rest.strip_prefix("sent_id")?.trim_start();
            Some(rest.strip_prefix('=')?.trim())
        })
    }

    /// Raw head column; `None` when any token has no head.
    pub fn heads(&self) -> Option<Vec<usize>> {
        self.tokens.iter().map(|t| t.head).collect()
    }

    /// Overwrite the head column with `tree`, setting DEPREL where given.
    pub fn set_tree(&mut self, tree: &DepTree, deprel: Option<&str>) {
        for (tok, &h) in self.tokens.iter_mut().zip(tree.heads()) {
            tok.head = Some(h);
            if let Some(rel) = deprel {
                tok.deprel = if h == 0 { "root".into() } else { rel.into() };
            }
        }
    }

    fn write(&self, out: &mut String) {
        for c in &self.comments {
            out.push_str(c);
            out.push('\n');
        }
        let mut extras = self.extra_lines.iter().peekable();
        for (k, tok) in self.tokens.iter().enumerate() {
            while let Some((_, line)) = extras.next_if(|(at, _)| *at <= k) {
                out.push_str(line);
                out.push('\n');
            }
            tok.write_line(out);
        }
        for (_, line) in extras {
            out.push_str(line);
            out.push('\n');
        }
        out.push('\n');
    }
}

/// Gold sentences paired with their trees.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Treebank {
    pub source: String,
    pub sentences: Vec<(Sentence, DepTree)>,
}

impl Treebank {
    pub fn new(source: impl Into<String>) -> Self {
        Treebank {
            source: source.into(),
            sentences: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|(s, _)| s.len()).sum()
    }

    pub fn trees(&self) -> impl Iterator<Item = &DepTree> {
        self.sentences.iter().map(|(_, t)| t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Sentence, DepTree)> {
        self.sentences.iter()
    }
}

/// Parse CoNLL-U text into sentences without checking the trees.
pub fn read_sentences(text: &str) -> Result<Vec<Sentence>, ConlluError> {
    let mut sentences = Vec::new();
    let mut current = Sentence::default();
    let mut open = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            if open {
                sentences.push(std::mem::take(&mut current));
                open = false;
            }
            continue;
        }
        open = true;
        if line.starts_with('#') {
            current.comments.push(line.to_string());
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != COLUMNS {
            return Err(ConlluError::ColumnCount {
                line: line_no,
                found: cols.len(),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            current.extra_lines.push((current.tokens.len(), line.to_string()));
            continue;
        }
        let id = cols[0].parse::<usize>().map_err(|_| ConlluError::BadId {
            line: line_no,
            id: cols[0].to_string(),
        })?;
        let head = match cols[6] {
            EMPTY => None,
            h => Some(h.parse::<usize>().map_err(|_| ConlluError::BadHead {
                line: line_no,
                head: h.to_string(),
            })?),
        };
        current.tokens.push(Token {
            id,
            form: cols[1].into(),
            lemma: cols[2].into(),
            upos: cols[3].into(),
            xpos: cols[4].into(),
            feats: cols[5].into(),
            head,
            deprel: cols[7].into(),
            deps: cols[8].into(),
            misc: cols[9].into(),
        });
    }
    if open {
        sentences.push(current);
    }
    Ok(sentences)
}

fn sentence_label(s: &Sentence, ordinal: usize) -> String {
    s.sent_id().map_or_else(|| format!("#{}", ordinal + 1), str::to_string)
}

/// Parse CoNLL-U text into a treebank, rejecting any sentence whose tree is
/// invalid.
pub fn parse_conllu(text: &str) -> Result<Treebank, ConlluError> {
    parse_conllu_named(text, "")
}

pub fn parse_conllu_named(text: &str, source: &str) -> Result<Treebank, ConlluError> {
    let mut tb = Treebank::new(source);
    for (k, sentence) in read_sentences(text)?.into_iter().enumerate() {
        let label = || sentence_label(&sentence, k);
        if sentence.tokens.iter().enumerate().any(|(i, t)| t.id != i + 1) {
            return Err(ConlluError::IdSequence { sentence: label() });
        }
        let mut heads = Vec::with_capacity(sentence.len());
        for t in &sentence.tokens {
            match t.head {
                Some(h) => heads.push(h),
                None => {
                    return Err(ConlluError::MissingHead {
                        sentence: label(),
                        token: t.id,
                    })
                }
            }
        }
        let verdict = validate_tree(&heads);
        if !verdict.is_valid() {
            return Err(ConlluError::InvalidTree {
                sentence: label(),
                verdict,
            });
        }
        let tree = DepTree::new(heads).expect("validated above");
        tb.sentences.push((sentence, tree));
    }
    Ok(tb)
}

/// Serialize a treebank. HEAD is taken from the paired tree.
pub fn write_conllu(treebank: &Treebank) -> String {
    let mut out = String::new();
    for (sentence, tree) in &treebank.sentences {
        let mut s = sentence.clone();
        for (tok, &h) in s.tokens.iter_mut().zip(tree.heads()) {
            tok.head = Some(h);
        }
        s.write(&mut out);
    }
    out
}

/// Serialize sentences as they are.
pub fn write_sentences<'a>(sentences: impl IntoIterator<Item = &'a Sentence>) -> String {
    let mut out = String::new();
    for s in sentences {
        s.write(&mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE: &str = "1\tThe\t_\t_\t_\t_\t2\tdet\t_\t_
2\ttrial\t_\t_\t_\t_\t3\tnsubj\t_\t_
3\tbegins\t_\t_\t_\t_\t0\troot\t_\t_
4\tagain\t_\t_\t_\t_\t3\tadvmod\t_\t_
5\tNov.\t_\t_\t_\t_\t3\tobl:tmod\t_\t_
6\t28\t_\t_\t_\t_\t5\tnummod\t_\t_
7\t.\t_\t_\t_\t_\t3\tpunct\t_\t_
";

    #[test]
    fn parses_example_block() {
        let tb = parse_conllu(EXAMPLE).unwrap();
        assert_eq!(tb.len(), 1);
        assert_eq!(tb.sentences[0].1.heads(), &[2, 3, 0, 3, 3, 5, 3]);
        let again = parse_conllu(&write_conllu(&tb)).unwrap();
        assert_eq!(again.sentences[0].1.heads(), &[2, 3, 0, 3, 3, 5, 3]);
    }

    #[test]
    fn empty_input() {
        let tb = parse_conllu("").unwrap();
        assert!(tb.is_empty());
        assert_eq!(write_conllu(&tb), "");
    }

    #[test]
    fn minimal_tree() {
        let text = "1\ta\t_\t_\t_\t_\t2\tdep\t_\t_\n2\tb\t_\t_\t_\t_\t0\troot\t_\t_\n";
        let tb = parse_conllu(text).unwrap();
        assert_eq!(tb.sentences[0].1.heads(), &[2, 0]);
        assert_eq!(write_conllu(&tb), format!("{text}\n"));
    }

    #[test]
    fn column_count_error_has_line() {
        let text = "# c\n1\ta\t_\t_\t_\t_\t0\troot\t_\n";
        assert_eq!(parse_conllu(text), Err(ConlluError::ColumnCount { line: 2, found: 9 }));
    }

    #[test]
    fn out_of_range_head_names_sentence() {
        let text = "# sent_id = s7\n1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n2\tb\t_\t_\t_\t_\t5\tdep\t_\t_\n";
        assert_eq!(
            parse_conllu(text),
            Err(ConlluError::InvalidTree {
                sentence: "s7".into(),
                verdict: Verdict::OutOfRange
            })
        );
    }

    #[test]
    fn multiword_and_empty_nodes_are_skipped_but_kept() {
        let text = "# text = don't go\n\
1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n\
2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n\
3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n\
3.1\tgone\t_\t_\t_\t_\t_\t_\t0:root\t_\n\n";
        let tb = parse_conllu(text).unwrap();
        assert_eq!(tb.sentences[0].1.heads(), &[3, 3, 0]);
        assert_eq!(write_conllu(&tb), text);
    }
}
