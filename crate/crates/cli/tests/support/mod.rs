//! Shared helpers for the CLI tests: synthetic treebanks, configs and a
//! mock model that answers with gold trees.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::Path;

use depbase::conllu::{write_conllu, Sentence, Treebank};
use depbase::rng::RngState;
use depbase::tree::DepTree;
use depbase::treealg::sample_uniform_rooted_labeled_tree;
use depbase_cli::RunConfig;
use depbase_llm::mock::{MockResponse, MockServer};

const TAGS: [&str; 6] = ["NOUN", "VERB", "DET", "ADP", "PUNCT", "ADJ"];

/// `count` random sentences with lengths in `1..=max_len`, forms unique per
/// sentence.
pub fn random_treebank(seed: u64, count: usize, min_len: usize, max_len: usize) -> Treebank {
    let mut rng = RngState::new(seed);
    let mut tb = Treebank::new("synthetic");
    for k in 0..count {
        let n = min_len + rng.below(max_len - min_len + 1);
        let heads = sample_uniform_rooted_labeled_tree(n, &mut rng).unwrap();
        let forms: Vec<String> = (1..=n).map(|i| format!("s{k}w{i}")).collect();
        let mut s = Sentence::from_forms(&forms);
        s.comments.push(format!("# sent_id = s{k}"));
        for (t, &h) in s.tokens.iter_mut().zip(&heads) {
            t.head = Some(h);
            t.upos = TAGS[rng.below(TAGS.len())].into();
            t.deprel = if h == 0 { "root".into() } else { "dep".into() };
        }
        tb.sentences.push((s, DepTree::new(heads).unwrap()));
    }
    tb
}

pub fn write_treebank(path: &Path, tb: &Treebank) {
    std::fs::write(path, write_conllu(tb)).unwrap();
}

pub fn config_text(ud: &str, seed: u64, baselines: &[&str], models: &[(&str, &str)]) -> String {
    let list: Vec<String> = baselines.iter().map(|b| format!("\"{b}\"")).collect();
    let mut s = format!(
        "ud_version = \"{ud}\"\nseed = {seed}\noutput_dir = \"out\"\nbaselines = [{}]\nconcurrency = 3\n\n[treebank]\ntrain = \"train.conllu\"\ntest = \"test.conllu\"\n",
        list.join(", ")
    );
    for (url, model) in models {
        s.push_str(&format!(
            "\n[[models]]\nurl = \"{url}\"\nmodel = \"{model}\"\napi_key_env = \"DEPBASE_TEST_NO_KEY\"\ntimeout_secs = 10\n[models.retry]\nmax_attempts = 3\nbase_delay_ms = 1\nmax_delay_ms = 4\n"
        ));
    }
    s
}

/// Write train/test files and a config into `dir`; returns the config.
pub fn setup(dir: &Path, test: &Treebank, train: &Treebank, text: &str) -> RunConfig {
    write_treebank(&dir.join("test.conllu"), test);
    write_treebank(&dir.join("train.conllu"), train);
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    RunConfig::load(&path).unwrap()
}

fn target_forms(prompt: &str) -> String {
    let last = prompt.lines().last().unwrap();
    let start = last.find(": <").unwrap() + 3;
    last[start..last.len() - 1].to_string()
}

/// Mock model that answers every prompt with the gold rows of its target,
/// wrapped in chatter.
pub fn gold_echo(test: &Treebank) -> MockServer {
    let mut answers: HashMap<String, String> = HashMap::new();
    for (s, t) in test.iter() {
        let forms: Vec<&str> = s.forms().collect();
        let mut rows = String::from("Sure! Here is the parse:\n");
        for (i, (tok, h)) in s.tokens.iter().zip(t.heads()).enumerate() {
            rows.push_str(&format!(
                "{}\t{}\t_\t_\t_\t_\t{}\t{}\t_\t_\n",
                i + 1,
                tok.form,
                h,
                tok.deprel
            ));
        }
        rows.push_str("Let me know if you need more.");
        answers.insert(forms.join(" "), rows);
    }
    MockServer::start(move |req| {
        let prompt = req.prompt().unwrap_or_default();
        match answers.get(&target_forms(&prompt)) {
            Some(a) => MockResponse::chat(a),
            None => MockResponse::status(400, "unknown sentence"),
        }
    })
    .unwrap()
}

/// Mock model that always answers with the same text.
pub fn fixed_answer(text: &'static str) -> MockServer {
    MockServer::start(move |_| MockResponse::chat(text)).unwrap()
}

/// Read every file under `dir` except the caches, as (relative path, bytes).
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                if p.file_name().unwrap() != "cache" {
                    stack.push(p);
                }
            } else {
                out.push((
                    p.strip_prefix(dir).unwrap().display().to_string(),
                    std::fs::read(&p).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}
