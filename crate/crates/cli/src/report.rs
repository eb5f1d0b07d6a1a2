//! Run summaries and their TSV tables.

use std::fmt::Write as _;
use std::path::Path;

use depbase::metrics::{format_delta, EvalReport, Percent};
use depbase::repair::RepairLevel;
use serde::{Deserialize, Serialize};

use crate::io::write_atomic;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Baseline,
    Llm,
}

impl SystemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::Baseline => "baseline",
            SystemKind::Llm => "llm",
        }
    }
}

/// Scores of the head column after the first repair step only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOneScores {
    pub uas: Percent,
    pub um: Percent,
}

/// Everything one system produced on one treebank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub treebank: String,
    pub ud_version: String,
    pub system: String,
    pub kind: SystemKind,
    pub seed: u64,
    /// Scores of the final (valid) trees.
    pub report: EvalReport,
    #[serde(default)]
    pub step1: Option<StepOneScores>,
    /// Sentences the sampling baseline had to adapt from another length.
    #[serde(default)]
    pub length_fallbacks: usize,
    /// Sentences for which no model response could be obtained.
    #[serde(default)]
    pub failed_queries: usize,
    pub predictions: String,
}

impl RunSummary {
    /// UAS and UM of the reported row: after the first step for models,
    /// the trees themselves for baselines.
    pub fn headline(&self) -> (Percent, Percent) {
        match self.step1 {
            Some(s) => (s.uas, s.um),
            None => (self.report.uas, self.report.um),
        }
    }
}

pub const REPORT_HEADER: &str =
    "treebank\tud_version\tsystem\tUAS\tUM\t%w\tUAS_step2_delta\tUM_step2_delta\tNP\tP1\tP2\tsentences\ttokens\tlength_fallbacks\tfailed_queries";

/// One row per run: UAS, UM and %w, with the gain of the second repair
/// step for model runs.
pub fn report_tsv(runs: &[RunSummary]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in runs {
        let (uas, um) = r.headline();
        let (du, dm) = match r.step1 {
            Some(s) => (format_delta(r.report.uas, s.uas), format_delta(r.report.um, s.um)),
            None => (String::new(), String::new()),
        };
        let h = |l| r.report.repair_histogram.get(&l).copied().unwrap_or(0);
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.treebank,
            r.ud_version,
            r.system,
            uas,
            um,
            r.report.pct_w,
            du,
            dm,
            h(RepairLevel::NP),
            h(RepairLevel::P1),
            h(RepairLevel::P2),
            r.report.sentences,
            r.report.tokens,
            r.length_fallbacks,
            r.failed_queries
        );
    }
    out
}

pub fn pos_tsv(runs: &[RunSummary]) -> String {
    let mut out = String::from("treebank\tsystem\tupos\tUAS\tcorrect\tcount\n");
    for r in runs {
        for (tag, p) in &r.report.per_pos {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.treebank, r.system, tag, p, p.hits, p.total
            );
        }
    }
    out
}

pub fn displacement_tsv(runs: &[RunSummary]) -> String {
    let mut out = String::from("treebank\tsystem\tdisplacement\tprecision\trecall\tf1\tmatched\tpredicted\tgold\n");
    for r in runs {
        for (d, b) in &r.report.per_displacement {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}\t{}\t{}",
                r.treebank,
                r.system,
                d,
                b.precision(),
                b.recall(),
                b.f1(),
                b.matched,
                b.predicted,
                b.gold
            );
        }
    }
    out
}

/// Write `<prefix>-runs.json` and the three tables into `dir`.
pub fn write_tables(dir: &Path, prefix: &str, runs: &[RunSummary]) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(runs).expect("summaries serialize");
    write_atomic(&dir.join(format!("{prefix}-report.tsv")), &report_tsv(runs))?;
    write_atomic(&dir.join(format!("{prefix}-pos.tsv")), &pos_tsv(runs))?;
    write_atomic(&dir.join(format!("{prefix}-displacement.tsv")), &displacement_tsv(runs))?;
    write_atomic(&dir.join(format!("{prefix}-runs.json")), &(json + "\n"))?;
    Ok(())
}

/// Summaries stored in a run directory by earlier commands.
pub fn read_runs(dir: &Path) -> Result<Vec<RunSummary>, CliError> {
    let io = |e| CliError::Io(dir.to_path_buf(), e);
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with("-runs.json") && !n.starts_with("merged"))
        })
        .collect();
    files.sort();
    let mut runs = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f).map_err(|e| CliError::Io(f.clone(), e))?;
        let mut batch: Vec<RunSummary> =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", f.display())))?;
        runs.append(&mut batch);
    }
    Ok(runs)
}

/// Combine runs into one table ordered by treebank then system name. All
/// runs must come from the same UD release.
pub fn merge(mut runs: Vec<RunSummary>) -> Result<Vec<RunSummary>, CliError> {
    if runs.is_empty() {
        return Err(CliError::Config("no completed runs found".into()));
    }
    let version = runs[0].ud_version.clone();
    if let Some(other) = runs.iter().find(|r| r.ud_version != version) {
        return Err(CliError::MixedVersions(version, other.ud_version.clone()));
    }
    runs.sort_by(|a, b| (&a.treebank, &a.system).cmp(&(&b.treebank, &b.system)));
    Ok(runs)
}
