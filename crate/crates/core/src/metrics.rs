//! Unlabeled evaluation against gold trees.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::conllu::Treebank;
use crate::repair::RepairLevel;
use crate::tree::DepTree;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("{gold} gold sentences but {pred} predictions")]
    SentenceCount { gold: usize, pred: usize },
    #[error("sentence {sentence}: gold has {gold} tokens, prediction has {pred}")]
    Alignment { sentence: String, gold: usize, pred: usize },
    #[error("no outputs to score")]
    EmptyInput,
}

/// An exact ratio shown as a percentage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Percent {
    pub hits: u64,
    pub total: u64,
}

impl Percent {
    pub fn new(hits: u64, total: u64) -> Self {
        Percent { hits, total }
    }

    /// Percentage as a float; 0 for an empty total.
    pub fn value(self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.hits as f64 / self.total as f64
        }
    }

    /// Percentage in hundredths, rounded half up.
    pub fn hundredths(self) -> u64 {
        if self.total == 0 {
            return 0;
        }
        (20_000 * self.hits + self.total) / (2 * self.total)
    }

    fn add(&mut self, hit: bool) {
        self.total += 1;
        self.hits += u64::from(hit);
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.hundredths();
        write!(f, "{}.{:02}", h / 100, h % 100)
    }
}

/// Signed difference `a - b` of two percentages in hundredths, formatted
/// with a sign and two decimals.
pub fn format_delta(a: Percent, b: Percent) -> String {
    let d = a.hundredths() as i64 - b.hundredths() as i64;
    let sign = if d < 0 { "-" } else { "+" };
    let d = d.unsigned_abs();
    format!("{sign}{}.{:02}", d / 100, d % 100)
}

/// Displacement bucket of an arc: dependent position minus head position,
/// with root arcs kept apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Displacement {
    Root,
    D(i64),
}

impl Displacement {
    pub fn of(dependent: usize, head: usize) -> Self {
        if head == 0 {
            Displacement::Root
        } else {
            Displacement::D(dependent as i64 - head as i64)
        }
    }
}

impl fmt::Display for Displacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Displacement::Root => f.write_str("root"),
            Displacement::D(d) => write!(f, "{d}"),
        }
    }
}

impl FromStr for Displacement {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "root" {
            Ok(Displacement::Root)
        } else {
            s.parse().map(Displacement::D)
        }
    }
}

// as strings so the buckets can key a JSON object
impl Serialize for Displacement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Displacement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Arc counts for one displacement bucket.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketScore {
    pub matched: u64,
    pub predicted: u64,
    pub gold: u64,
}

impl BucketScore {
    pub fn precision(&self) -> f64 {
        ratio(self.matched, self.predicted)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.matched, self.gold)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn check_alignment(gold: &Treebank, pred: &[DepTree]) -> Result<(), MetricsError> {
    if gold.len() != pred.len() {
        return Err(MetricsError::SentenceCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    for (k, ((s, g), p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(MetricsError::Alignment {
                sentence: s.sent_id().map_or_else(|| format!("#{}", k + 1), str::to_string),
                gold: g.len(),
                pred: p.len(),
            });
        }
    }
    Ok(())
}

/// Share of tokens whose predicted head is the gold head, over the corpus.
pub fn uas(gold: &Treebank, pred: &[DepTree]) -> Result<Percent, MetricsError> {
    check_alignment(gold, pred)?;
    let mut pct = Percent::default();
    for ((_, g), p) in gold.iter().zip(pred) {
        for (a, b) in g.heads().iter().zip(p.heads()) {
            pct.add(a == b);
        }
    }
    Ok(pct)
}

/// Share of sentences with every head right, the root arc included.
pub fn um(gold: &Treebank, pred: &[DepTree]) -> Result<Percent, MetricsError> {
    check_alignment(gold, pred)?;
    let mut pct = Percent::default();
    for ((_, g), p) in gold.iter().zip(pred) {
        pct.add(g == p);
    }
    Ok(pct)
}

/// Share of outputs that needed no repair beyond dropping prose.
pub fn pct_wellformed(levels: &[RepairLevel]) -> Result<Percent, MetricsError> {
    if levels.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let np = levels.iter().filter(|&&l| l == RepairLevel::NP).count();
    Ok(Percent::new(np as u64, levels.len() as u64))
}

/// UAS grouped by the dependent's gold UPOS.
pub fn uas_by_pos(gold: &Treebank, pred: &[DepTree]) -> Result<BTreeMap<String, Percent>, MetricsError> {
    check_alignment(gold, pred)?;
    let mut out: BTreeMap<String, Percent> = BTreeMap::new();
    for ((s, g), p) in gold.iter().zip(pred) {
        for ((tok, a), b) in s.tokens.iter().zip(g.heads()).zip(p.heads()) {
            out.entry(tok.upos.clone()).or_default().add(a == b);
        }
    }
    Ok(out)
}

/// Precision, recall and F1 per displacement bucket. An arc matches when
/// gold and prediction give the dependent the same head.
pub fn displacement_fscore(
    gold: &Treebank,
    pred: &[DepTree],
) -> Result<BTreeMap<Displacement, BucketScore>, MetricsError> {
    check_alignment(gold, pred)?;
    let mut out: BTreeMap<Displacement, BucketScore> = BTreeMap::new();
    for ((_, g), p) in gold.iter().zip(pred) {
        for (i, (&gh, &ph)) in g.heads().iter().zip(p.heads()).enumerate() {
            let d = i + 1;
            out.entry(Displacement::of(d, gh)).or_default().gold += 1;
            let bucket = out.entry(Displacement::of(d, ph)).or_default();
            bucket.predicted += 1;
            bucket.matched += u64::from(gh == ph);
        }
    }
    Ok(out)
}

/// UAS and UM of head columns that need not form trees (out-of-range and
/// negative heads simply never match).
pub fn score_raw(gold: &Treebank, pred: &[Vec<i64>]) -> Result<(Percent, Percent), MetricsError> {
    if gold.len() != pred.len() {
        return Err(MetricsError::SentenceCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut u = Percent::default();
    let mut m = Percent::default();
    for (k, ((s, g), p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(MetricsError::Alignment {
                sentence: s.sent_id().map_or_else(|| format!("#{}", k + 1), str::to_string),
                gold: g.len(),
                pred: p.len(),
            });
        }
        let mut all = true;
        for (&a, &b) in g.heads().iter().zip(p) {
            let hit = a as i64 == b;
            all &= hit;
            u.add(hit);
        }
        m.add(all);
    }
    Ok((u, m))
}

/// Every metric for one system on one treebank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub uas: Percent,
    pub um: Percent,
    pub pct_w: Percent,
    pub per_pos: BTreeMap<String, Percent>,
    pub per_displacement: BTreeMap<Displacement, BucketScore>,
    pub repair_histogram: BTreeMap<RepairLevel, u64>,
    pub sentences: usize,
    pub tokens: usize,
}

impl EvalReport {
    /// Score `pred` against `gold`; `levels` holds one repair level per
    /// sentence.
    pub fn evaluate(gold: &Treebank, pred: &[DepTree], levels: &[RepairLevel]) -> Result<Self, MetricsError> {
        if levels.len() != gold.len() {
            return Err(MetricsError::SentenceCount {
                gold: gold.len(),
                pred: levels.len(),
            });
        }
        let mut repair_histogram: BTreeMap<RepairLevel, u64> = RepairLevel::ALL.iter().map(|&l| (l, 0)).collect();
        for &l in levels {
            *repair_histogram.entry(l).or_default() += 1;
        }
        Ok(EvalReport {
            uas: uas(gold, pred)?,
            um: um(gold, pred)?,
            pct_w: pct_wellformed(levels)?,
            per_pos: uas_by_pos(gold, pred)?,
            per_displacement: displacement_fscore(gold, pred)?,
            repair_histogram,
            sentences: gold.len(),
            tokens: gold.token_count(),
        })
    }
}
