//! Turning free-form model output into a valid tree.
//!
//! The first step keeps only tab-separated lines that start with a token id
//! and coerces them into exactly `n` ten-column rows. The second step fixes
//! the head column: one root, in-range heads, no cycles.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::conllu::{Sentence, COLUMNS, EMPTY};
use crate::rng::RngState;
use crate::tree::DepTree;

/// How much repair an output needed.
#[derive(Clone, Copy, Debug, Eq, Hash, Ord, PartialEq, PartialOrd, Serialize, Deserialize)]
pub enum RepairLevel {
    /// Only surrounding prose had to be dropped.
    NP,
    /// The table itself had to be reformatted.
    P1,
    /// The head column did not form a tree.
    P2,
}

impl RepairLevel {
    pub const ALL: [RepairLevel; 3] = [RepairLevel::NP, RepairLevel::P1, RepairLevel::P2];

    pub fn from_flags(format_touched: bool, tree_touched: bool) -> Self {
        match (format_touched, tree_touched) {
            (_, true) => RepairLevel::P2,
            (true, false) => RepairLevel::P1,
            (false, false) => RepairLevel::NP,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RepairLevel::NP => "NP",
            RepairLevel::P1 => "P1",
            RepairLevel::P2 => "P2",
        }
    }
}

impl fmt::Display for RepairLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A model response and the sentence it should annotate.
#[derive(Clone, Copy, Debug)]
pub struct RawOutput<'a> {
    pub text: &'a str,
    pub target: &'a Sentence,
}

impl<'a> RawOutput<'a> {
    pub fn new(text: &'a str, target: &'a Sentence) -> Self {
        RawOutput { text, target }
    }
}

/// A ten-column row with a parsed head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub columns: [String; COLUMNS],
    pub head: i64,
}

impl Row {
    fn synthesized(id: usize, form: &str) -> Self {
        let mut columns: [String; COLUMNS] = std::array::from_fn(|_| EMPTY.to_string());
        columns[0] = id.to_string();
        columns[1] = form.to_string();
        columns[6] = "0".into();
        columns[7] = "dep".into();
        Row { columns, head: 0 }
    }

    pub fn deprel(&self) -> &str {
        &self.columns[7]
    }
}

/// Exactly `n` rows with ids `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowTable {
    pub rows: Vec<Row>,
}

impl RowTable {
    pub fn heads(&self) -> Vec<i64> {
        self.rows.iter().map(|r| r.head).collect()
    }
}

impl fmt::Display for RowTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{}", row.columns.join("\t"))?;
        }
        Ok(())
    }
}

fn parse_id(field: &str) -> Option<usize> {
    let id = field.trim().parse::<usize>().ok()?;
    (id > 0).then_some(id)
}

/// Split a tabular line into fields. `None` for prose. The flag is set when
/// the id had to be split off the first field at a space.
fn tabular_fields(line: &str) -> Option<(Vec<&str>, bool)> {
    if !line.contains('\t') {
        return None;
    }
    let mut fields: Vec<&str> = line.split('\t').collect();
    if fields.len() < 2 {
        return None;
    }
    if parse_id(fields[0]).is_some() {
        return Some((fields, false));
    }
    let first = fields[0].trim_start();
    let (id, rest) = first.split_once(char::is_whitespace)?;
    parse_id(id)?;
    let rest = rest.trim_start();
    fields.splice(0..1, [id, rest]);
    Some((fields, true))
}

/// Coerce the fields of one row into ten columns. Returns the columns, the
/// parsed head and whether anything was changed.
fn align_row(fields: &[&str]) -> ([String; COLUMNS], i64, bool) {
    let mut touched = false;
    let mut cols: Vec<String> = if fields.len() == COLUMNS {
        fields.iter().map(|s| s.to_string()).collect()
    } else {
        touched = true;
        // anchor on the first integer field after FORM: that is HEAD, what
        // sits between FORM and HEAD fills LEMMA..FEATS, the rest fills
        // DEPREL..MISC
        match (2..fields.len()).find(|&i| fields[i].trim().parse::<i64>().is_ok()) {
            Some(h) => {
                let mut out: Vec<String> = fields[..2].iter().map(|s| s.to_string()).collect();
                out.extend(fit(&fields[2..h], 4));
                out.push(fields[h].to_string());
                out.extend(fit(&fields[h + 1..], 3));
                out
            }
            None => fit(fields, COLUMNS),
        }
    };
    let head = match cols[6].trim().parse::<i64>() {
        Ok(h) => {
            if cols[6] != h.to_string() {
                cols[6] = h.to_string();
                touched = true;
            }
            h
        }
        Err(_) => {
            cols[6] = "0".into();
            touched = true;
            0
        }
    };
    let cols: [String; COLUMNS] = cols.try_into().expect("ten columns");
    (cols, head, touched)
}

fn fit(fields: &[&str], width: usize) -> Vec<String> {
    let mut out: Vec<String> = fields.iter().take(width).map(|s| s.to_string()).collect();
    out.resize(width, EMPTY.to_string());
    out
}

/// First repair step: keep tabular lines and fill or trim them into exactly
/// `n` ten-column rows. The flag is false when dropping non-tabular lines
/// was all that was needed.
pub fn repair_format(raw: &RawOutput<'_>) -> (RowTable, bool) {
    let n = raw.target.len();
    let mut slots: Vec<Option<Row>> = vec![None; n];
    let mut touched = false;

    for line in raw.text.lines() {
        let line = line.trim_end_matches(['\r', '\n', ' ']);
        let Some((fields, split_id)) = tabular_fields(line) else {
            continue;
        };
        touched |= split_id;
        let id = parse_id(fields[0]).expect("tabular lines start with an id");
        if id > n || slots[id - 1].is_some() {
            touched = true;
            continue;
        }
        let (mut columns, head, row_touched) = align_row(&fields);
        touched |= row_touched;
        if columns[0] != id.to_string() {
            columns[0] = id.to_string();
            touched = true;
        }
        slots[id - 1] = Some(Row { columns, head });
    }

    let rows = slots
        .into_iter()
        .enumerate()
        .map(|(i, slot)| {
            slot.unwrap_or_else(|| {
                touched = true;
                Row::synthesized(i + 1, &raw.target.tokens[i].form)
            })
        })
        .collect();
    (RowTable { rows }, touched)
}

/// Second repair step with the root drawn from `rng`.
pub fn repair_tree(heads: &[i64], rng: &mut RngState) -> (Vec<usize>, bool) {
    repair_tree_with(heads, |candidates| {
        if candidates.len() == 1 {
            candidates[0]
        } else {
            candidates[rng.below(candidates.len())]
        }
    })
}

/// Second repair step: make `heads` a tree.
///
/// `pick_root` receives the positions attached to 0 (or every position when
/// there are none) and returns the one to keep as root. The other former
/// roots, out-of-range heads and self loops are reattached to the root. A
/// breadth-first search from the root then finds nodes caught in cycles;
/// each cycle is cut at its lowest position, which is reattached to the
/// root, until every node is reached. Returns the repaired heads and
/// whether anything changed.
pub fn repair_tree_with(heads: &[i64], pick_root: impl FnOnce(&[usize]) -> usize) -> (Vec<usize>, bool) {
    let n = heads.len();
    if n == 0 {
        return (Vec::new(), false);
    }
    let mut candidates: Vec<usize> = (1..=n).filter(|&d| heads[d - 1] == 0).collect();
    if candidates.is_empty() {
        candidates = (1..=n).collect();
    }
    let root = pick_root(&candidates);
    assert!(candidates.contains(&root), "root must be one of the candidates");

    let mut out: Vec<usize> = heads
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let d = i + 1;
            if d == root {
                0
            } else if h <= 0 || h as u64 > n as u64 || h as usize == d {
                root
            } else {
                h as usize
            }
        })
        .collect();

    let mut children = vec![Vec::new(); n + 1];
    for d in 1..=n {
        children[out[d - 1]].push(d);
    }
    let mut reached = vec![false; n + 1];
    let mut queue = VecDeque::new();
    let mut visit = |start: usize, reached: &mut Vec<bool>, children: &Vec<Vec<usize>>| {
        reached[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &c in &children[v] {
                if !reached[c] {
                    reached[c] = true;
                    queue.push_back(c);
                }
            }
        }
    };
    visit(root, &mut reached, &children);

    let mut next = 1;
    loop {
        while next <= n && reached[next] {
            next += 1;
        }
        if next > n {
            break;
        }
        // walk up from the lowest unreached node to the cycle it hangs from
        let mut on_walk = vec![false; n + 1];
        let mut v = next;
        while !on_walk[v] {
            on_walk[v] = true;
            v = out[v - 1];
        }
        let mut cut = v;
        let mut w = out[v - 1];
        while w != v {
            cut = cut.min(w);
            w = out[w - 1];
        }
        let old = out[cut - 1];
        children[old].retain(|&c| c != cut);
        out[cut - 1] = root;
        children[root].push(cut);
        visit(cut, &mut reached, &children);
    }

    let touched = out.iter().zip(heads).any(|(&o, &h)| o as i64 != h);
    (out, touched)
}

/// Result of both repair steps.
#[derive(Clone, Debug)]
pub struct Repaired {
    pub table: RowTable,
    /// Heads after the first step, before any tree repair.
    pub format_heads: Vec<i64>,
    pub tree: DepTree,
    pub format_touched: bool,
    pub tree_touched: bool,
    pub level: RepairLevel,
}

impl Repaired {
    /// The repaired rows as tab-separated text, HEAD replaced by the tree.
    pub fn to_rows(&self) -> String {
        let mut table = self.table.clone();
        for (row, &h) in table.rows.iter_mut().zip(self.tree.heads()) {
            row.columns[6] = h.to_string();
            row.head = h as i64;
        }
        table.to_string()
    }

    /// The target sentence annotated with the repaired tree and the model's
    /// relation labels.
    pub fn annotate(&self, target: &Sentence) -> Sentence {
        let mut s = target.clone();
        for ((tok, &h), row) in s.tokens.iter_mut().zip(self.tree.heads()).zip(&self.table.rows) {
            tok.head = Some(h);
            tok.deprel = row.deprel().to_string();
        }
        s
    }
}

/// Run both steps and classify the result.
pub fn postprocess(raw: &RawOutput<'_>, rng: &mut RngState) -> Repaired {
    let (table, format_touched) = repair_format(raw);
    let format_heads = table.heads();
    let (heads, tree_touched) = repair_tree(&format_heads, rng);
    let tree = DepTree::new(heads).expect("repair yields a valid tree");
    Repaired {
        table,
        format_heads,
        tree,
        format_touched,
        tree_touched,
        level: RepairLevel::from_flags(format_touched, tree_touched),
    }
}
