//! The `baseline`, `llm` and `report` commands.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use depbase::baselines::{build_length_index, BaselineGenerator, BaselineKind, BASELINE_DEPREL};
use depbase::conllu::{write_sentences, Sentence, Treebank, EMPTY};
use depbase::metrics::{score_raw, EvalReport};
use depbase::repair::{postprocess, RawOutput, RepairLevel};
use depbase::rng::RngState;
use depbase::tree::DepTree;
use depbase_llm::{build_prompt, pick_example, Client, EndpointConfig, Job, ResponseCache};

use crate::config::RunConfig;
use crate::io::{read_treebank, slug, write_atomic};
use crate::report::{merge, read_runs, write_tables, RunSummary, StepOneScores, SystemKind};
use crate::CliError;

fn load_test(config: &RunConfig) -> Result<Treebank, CliError> {
    let test = read_treebank(&config.treebank.test)?;
    if test.is_empty() {
        return Err(CliError::EmptyTreebank(config.treebank.test.clone()));
    }
    Ok(test)
}

fn load_train(config: &RunConfig, why: &str) -> Result<Treebank, CliError> {
    let path = config
        .treebank
        .train
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("{why} needs treebank.train")))?;
    read_treebank(path)
}

/// Per-system seed so that systems draw from unrelated streams.
fn system_seed(seed: u64, system: &str) -> u64 {
    // FNV-1a over the name
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in system.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

fn prediction_sentence(gold: &Sentence, tree: &DepTree) -> Sentence {
    let mut s = gold.clone();
    for t in &mut s.tokens {
        t.deps = EMPTY.into();
    }
    s.set_tree(tree, None);
    s
}

/// Generate every configured baseline for the test split, write predictions
/// and tables, and return the summaries.
pub fn cmd_baseline(config: &RunConfig) -> Result<Vec<RunSummary>, CliError> {
    if config.baselines.is_empty() {
        return Err(CliError::Config("no baseline systems configured".into()));
    }
    let test = load_test(config)?;
    let index = if config.baselines.contains(&BaselineKind::S) {
        Some(build_length_index(&load_train(config, "the S baseline")?))
    } else {
        None
    };
    let mut generator = BaselineGenerator::new(index);
    generator.prepare(test.trees().map(DepTree::len).max().unwrap_or(1));

    let mut runs = Vec::new();
    let mut files = Vec::new();
    for &kind in &config.baselines {
        let base = system_seed(config.seed, kind.name());
        let mut trees = Vec::with_capacity(test.len());
        let mut sentences = Vec::with_capacity(test.len());
        let mut fallbacks = 0;
        for (k, (s, gold)) in test.iter().enumerate() {
            let mut rng = RngState::for_item(base, k);
            let g = generator.generate(kind, gold.len(), &mut rng)?;
            fallbacks += usize::from(g.fallback_length.is_some());
            let mut p = prediction_sentence(s, &g.tree);
            p.set_tree(&g.tree, Some(BASELINE_DEPREL));
            sentences.push(p);
            trees.push(g.tree);
        }
        let levels = vec![RepairLevel::NP; trees.len()];
        let report = EvalReport::evaluate(&test, &trees, &levels)?;
        let file = format!("predictions/{}.conllu", slug(kind.name()));
        files.push((file.clone(), write_sentences(&sentences)));
        runs.push(RunSummary {
            treebank: config.name(),
            ud_version: config.ud_version.clone(),
            system: kind.name().to_string(),
            kind: SystemKind::Baseline,
            seed: config.seed,
            report,
            step1: None,
            length_fallbacks: fallbacks,
            failed_queries: 0,
            predictions: file,
        });
    }
    for (file, text) in files {
        write_atomic(&config.output_dir.join(file), &text)?;
    }
    write_tables(&config.output_dir, "baseline", &runs)?;
    Ok(runs)
}

/// Query every configured model (or replay its cache), repair and score.
/// Sentences without a response are scored from an empty answer and
/// counted in `failed_queries`.
pub fn cmd_llm(config: &RunConfig) -> Result<Vec<RunSummary>, CliError> {
    if config.models.is_empty() {
        return Err(CliError::Config("no models configured".into()));
    }
    let test = load_test(config)?;
    let train = load_train(config, "the prompt example")?;
    let (ex_sentence, ex_tree) = pick_example(&train, &mut RngState::new(config.seed))?;
    let jobs: Vec<Job> = test
        .iter()
        .enumerate()
        .map(|(k, (s, _))| Job {
            ordinal: k,
            prompt: build_prompt(&ex_sentence, &ex_tree, s),
            words: s.len(),
        })
        .collect();

    let mut runs = Vec::new();
    for model in &config.models {
        runs.push(run_model(config, &test, &jobs, model)?);
    }
    write_tables(&config.output_dir, "llm", &runs)?;
    Ok(runs)
}

fn run_model(
    config: &RunConfig,
    test: &Treebank,
    jobs: &[Job],
    model: &EndpointConfig,
) -> Result<RunSummary, CliError> {
    let name = slug(&model.model);
    let cache = Arc::new(ResponseCache::open(
        config.output_dir.join("cache").join(format!("{name}.jsonl")),
    )?);
    let client = Client::new(model.clone(), Some(cache));
    let answers = client.query_all(&config.run_id(), jobs, config.concurrency);

    let base = system_seed(config.seed, &model.model);
    let mut failed = 0;
    let mut trees = Vec::with_capacity(test.len());
    let mut step1 = Vec::with_capacity(test.len());
    let mut levels = Vec::with_capacity(test.len());
    let mut sentences = Vec::with_capacity(test.len());
    for (k, ((s, _), answer)) in test.iter().zip(answers).enumerate() {
        let text = match answer {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{}: sentence {}: {e}", model.model, k + 1);
                failed += 1;
                String::new()
            }
        };
        let r = postprocess(&RawOutput::new(&text, s), &mut RngState::for_item(base, k));
        let mut p = r.annotate(s);
        for t in &mut p.tokens {
            t.deps = EMPTY.into();
        }
        sentences.push(p);
        step1.push(r.format_heads.clone());
        levels.push(r.level);
        trees.push(r.tree);
    }
    let report = EvalReport::evaluate(test, &trees, &levels)?;
    let (uas, um) = score_raw(test, &step1)?;
    let file = format!("predictions/{name}.conllu");
    write_atomic(&config.output_dir.join(&file), &write_sentences(&sentences))?;
    Ok(RunSummary {
        treebank: config.name(),
        ud_version: config.ud_version.clone(),
        system: model.model.clone(),
        kind: SystemKind::Llm,
        seed: config.seed,
        report,
        step1: Some(StepOneScores { uas, um }),
        length_fallbacks: 0,
        failed_queries: failed,
        predictions: file,
    })
}

/// Merge the summaries found in `dirs` and write `merged-*` tables into
/// `out`.
pub fn cmd_report(dirs: &[PathBuf], out: &Path) -> Result<Vec<RunSummary>, CliError> {
    let mut all = Vec::new();
    for d in dirs {
        all.extend(read_runs(d)?);
    }
    let merged = merge(all)?;
    write_tables(out, "merged", &merged)?;
    Ok(merged)
}
