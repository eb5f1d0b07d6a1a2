mod support;

use std::process::Command;

use depbase::metrics::Percent;
use depbase::repair::RepairLevel;
use depbase_cli::report::{merge, report_tsv};
use depbase_cli::{cmd_baseline, cmd_llm, cmd_report, CliError};
use support::*;

#[test]
fn branching_baselines_score_like_a_direct_count() {
    let dir = tempfile::tempdir().unwrap();
    let test = random_treebank(1, 60, 1, 15);
    let train = random_treebank(2, 80, 1, 12);
    let cfg = setup(dir.path(), &test, &train, &config_text("2.14", 5, &["L", "R"], &[]));
    let runs = cmd_baseline(&cfg).unwrap();
    assert_eq!(runs.len(), 2);
    for (run, left) in runs.iter().zip([true, false]) {
        let mut hit = 0u64;
        let mut full = 0u64;
        let mut total = 0u64;
        for (_, t) in test.iter() {
            let n = t.len();
            let mut all = true;
            for d in 1..=n {
                let h = if left {
                    if d == n {
                        0
                    } else {
                        d + 1
                    }
                } else {
                    d - 1
                };
                total += 1;
                if t.heads()[d - 1] == h {
                    hit += 1;
                } else {
                    all = false;
                }
            }
            full += u64::from(all);
        }
        assert_eq!(run.report.uas, Percent::new(hit, total));
        assert_eq!(run.report.um, Percent::new(full, test.len() as u64));
        assert_eq!(run.report.pct_w.to_string(), "100.00");
    }
    let tsv = std::fs::read_to_string(cfg.output_dir.join("baseline-report.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 3);
    assert!(tsv.lines().nth(1).unwrap().starts_with("test\t2.14\tL\t"));
    let pred = std::fs::read_to_string(cfg.output_dir.join("predictions/L.conllu")).unwrap();
    assert_eq!(depbase::conllu::parse_conllu(&pred).unwrap().len(), test.len());
}

#[test]
fn all_baselines_are_wellformed_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let test = random_treebank(3, 40, 1, 20);
    // no length-20 reference trees, so S has to fall back sometimes
    let train = random_treebank(4, 50, 1, 10);
    let all = ["A", "R", "L", "RD", "RD*", "LI", "LI*", "S"];
    let cfg = setup(dir.path(), &test, &train, &config_text("2.14", 11, &all, &[]));
    let runs = cmd_baseline(&cfg).unwrap();
    let first = snapshot(&cfg.output_dir);
    assert_eq!(runs.len(), 8);
    for r in &runs {
        assert_eq!(r.report.pct_w.to_string(), "100.00");
        assert_eq!(r.report.repair_histogram[&RepairLevel::NP], 40);
    }
    assert!(runs.iter().find(|r| r.system == "S").unwrap().length_fallbacks > 0);
    cmd_baseline(&cfg).unwrap();
    assert_eq!(snapshot(&cfg.output_dir), first);
}

#[test]
fn left_branching_displacements_sit_at_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let test = random_treebank(5, 10, 2, 9);
    let cfg = setup(dir.path(), &test, &test, &config_text("2.14", 1, &["L"], &[]));
    cmd_baseline(&cfg).unwrap();
    let tsv = std::fs::read_to_string(cfg.output_dir.join("baseline-displacement.tsv")).unwrap();
    for line in tsv.lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols[2] != "-1" && cols[2] != "root" {
            assert_eq!(cols[7], "0", "{line}");
        }
    }
}

#[test]
fn empty_test_split_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let empty = depbase::conllu::Treebank::new("e");
    let cfg = setup(
        dir.path(),
        &empty,
        &random_treebank(1, 5, 1, 5),
        &config_text("2.14", 1, &["L"], &[]),
    );
    assert!(matches!(cmd_baseline(&cfg), Err(CliError::EmptyTreebank(_))));
    assert!(!cfg.output_dir.exists());
}

#[test]
fn report_merges_and_orders_runs() {
    let root = tempfile::tempdir().unwrap();
    let a = root.path().join("a");
    let b = root.path().join("b");
    std::fs::create_dir_all(&a).unwrap();
    std::fs::create_dir_all(&b).unwrap();
    let test = random_treebank(6, 12, 1, 8);
    let ca = setup(&a, &test, &test, &config_text("2.14", 1, &["R"], &[]));
    let cb = setup(&b, &test, &test, &config_text("2.14", 1, &["L", "A"], &[]));
    let single = cmd_baseline(&ca).unwrap();
    cmd_baseline(&cb).unwrap();

    let out = root.path().join("merged");
    let merged = cmd_report(std::slice::from_ref(&ca.output_dir), &out).unwrap();
    assert_eq!(report_tsv(&merged), report_tsv(&single));

    let merged = cmd_report(&[ca.output_dir.clone(), cb.output_dir.clone()], &out).unwrap();
    let systems: Vec<&str> = merged.iter().map(|r| r.system.as_str()).collect();
    assert_eq!(systems, vec!["A", "L", "R"]);
    let tsv = std::fs::read_to_string(out.join("merged-report.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 4);

    let mut other = single.clone();
    other[0].ud_version = "2.13".into();
    let mut all = single;
    all.extend(other);
    assert!(matches!(merge(all), Err(CliError::MixedVersions(..))));
}

#[test]
fn gold_echo_model_scores_full_marks() {
    let dir = tempfile::tempdir().unwrap();
    let test = random_treebank(7, 25, 1, 12);
    let train = random_treebank(8, 30, 4, 7);
    let server = gold_echo(&test);
    let url = server.url();
    let cfg = setup(
        dir.path(),
        &test,
        &train,
        &config_text("2.14", 3, &[], &[(&url, "echo")]),
    );
    let runs = cmd_llm(&cfg).unwrap();
    let r = &runs[0];
    assert_eq!(r.report.uas.to_string(), "100.00");
    assert_eq!(r.report.um.to_string(), "100.00");
    assert_eq!(r.report.pct_w.to_string(), "100.00");
    assert_eq!(r.step1.unwrap().uas.to_string(), "100.00");
    assert_eq!(r.failed_queries, 0);
    assert_eq!(server.hits(), 25);
}

#[test]
fn googleos_replay_is_p2_and_seeded() {
    let raw: &'static str = include_str!("fixtures/googleos_raw.txt");
    let dir = tempfile::tempdir().unwrap();
    let mut test = depbase::conllu::Treebank::new("googleos");
    let forms = ["What", "if", "Google", "Morphed", "Into", "GoogleOS", "?"];
    let mut s = depbase::conllu::Sentence::from_forms(&forms);
    let gold = vec![4, 4, 4, 0, 6, 4, 4];
    for (t, &h) in s.tokens.iter_mut().zip(&gold) {
        t.head = Some(h);
    }
    test.sentences.push((s, depbase::tree::DepTree::new(gold).unwrap()));
    let server = fixed_answer(raw);
    let url = server.url();
    let train = random_treebank(9, 10, 4, 7);
    let cfg = setup(
        dir.path(),
        &test,
        &train,
        &config_text("2.14", 21, &[], &[(&url, "replay")]),
    );
    let a = cmd_llm(&cfg).unwrap();
    assert_eq!(a[0].report.repair_histogram[&RepairLevel::P2], 1);
    let tree_a = std::fs::read_to_string(cfg.output_dir.join("predictions/replay.conllu")).unwrap();
    std::fs::remove_dir_all(&cfg.output_dir).unwrap();
    cmd_llm(&cfg).unwrap();
    let tree_b = std::fs::read_to_string(cfg.output_dir.join("predictions/replay.conllu")).unwrap();
    assert_eq!(tree_a, tree_b);
}

#[test]
fn cache_replay_is_byte_identical_without_network() {
    let dir = tempfile::tempdir().unwrap();
    let test = random_treebank(10, 15, 1, 10);
    let train = random_treebank(11, 20, 4, 7);
    let server = gold_echo(&test);
    let url = server.url();
    let cfg = setup(
        dir.path(),
        &test,
        &train,
        &config_text("2.14", 3, &[], &[(&url, "echo")]),
    );
    cmd_llm(&cfg).unwrap();
    let first = snapshot(&cfg.output_dir);
    let hits = server.hits();
    drop(server);
    // same config, endpoint now gone: everything must come from the cache
    cmd_llm(&cfg).unwrap();
    assert_eq!(snapshot(&cfg.output_dir), first);
    assert_eq!(hits, 15);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_depbase");
    let dir = tempfile::tempdir().unwrap();
    let test = random_treebank(12, 8, 1, 8);
    let train = random_treebank(13, 8, 4, 7);
    setup(
        dir.path(),
        &test,
        &train,
        &config_text(
            "2.14",
            1,
            &["L", "R"],
            &[("http://127.0.0.1:9/v1/chat/completions", "gone")],
        ),
    );
    let cfg = dir.path().join("run.toml");

    let ok = Command::new(exe)
        .args(["baseline", "--config"])
        .arg(&cfg)
        .args(["--systems", "L,RD*"])
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let stdout = String::from_utf8(ok.stdout).unwrap();
    assert!(stdout.contains("\tRD*\t"));

    let bad = Command::new(exe)
        .args(["baseline", "--config", "/nonexistent.toml"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));

    // unreachable model: every sentence fails, run is still scored
    let partial = Command::new(exe).args(["llm", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(partial.status.code(), Some(2));
    assert!(dir.path().join("out/llm-report.tsv").exists());

    let report = Command::new(exe)
        .args(["report", "--output"])
        .arg(dir.path().join("merged"))
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(report.status.code(), Some(2));
    let tsv = std::fs::read_to_string(dir.path().join("merged/merged-report.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 4);
}
