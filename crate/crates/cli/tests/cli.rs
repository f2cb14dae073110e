mod common;

use common::{build_inputs, commands, run_in, run_suite};
use serde_json::Value;

fn suite_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    build_inputs(dir.path());
    dir
}

fn json(dir: &std::path::Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn every_subcommand_succeeds_and_writes_its_outputs() {
    let dir = suite_dir();
    run_suite(dir.path(), 2, 0).unwrap();
    for (label, _, outputs) in commands() {
        for o in outputs {
            assert!(dir.path().join(o).is_file(), "{label} did not write {o}");
        }
    }
}

#[test]
fn outputs_have_expected_content() {
    let dir = suite_dir();
    let d = dir.path();
    run_suite(d, 2, 0).unwrap();

    let dist = json(d, "dist.json");
    assert_eq!(dist["probs"][0]["lang"], "en");
    let schedule = std::fs::read_to_string(d.join("schedule.txt")).unwrap();
    assert_eq!(schedule.lines().count(), 5000);

    let meta = std::fs::read_to_string(d.join("cb.emb.meta.jsonl")).unwrap();
    assert!(meta.contains("\"k\":12"), "{meta}");
    let assigned = std::fs::read_to_string(d.join("assigned.tsv")).unwrap();
    assert_eq!(assigned.lines().count(), 30);
    assert!(assigned.lines().all(|l| l.split('\t').nth(1).unwrap().split(' ').count() == 50));

    for line in std::fs::read_to_string(d.join("dedup.tsv")).unwrap().lines() {
        let units: Vec<&str> = line.split('\t').nth(1).unwrap().split_whitespace().collect();
        assert!(units.windows(2).all(|w| w[0] != w[1]));
    }
    assert!(!std::fs::read_to_string(d.join("ctc.tsv"))
        .unwrap()
        .lines()
        .any(|l| l.split('\t').nth(1).unwrap().split_whitespace().any(|u| u == "0")));

    let pairs = std::fs::read_to_string(d.join("pairs.tsv")).unwrap();
    assert!(pairs.starts_with("score\tsrc_id"));
    let kept = std::fs::read_to_string(d.join("kept.tsv")).unwrap();
    assert!(kept.lines().count() <= pairs.lines().count());

    let sim = json(d, "simsearch.json");
    assert_eq!(sim["total"], 200);

    let bleu = json(d, "bleu.json");
    assert!(bleu["bleu"].as_f64().unwrap() > 0.0);
    let asr = json(d, "asr_bleu.json");
    let score = asr["bleu"].as_f64().unwrap();
    assert!(score > 50.0 && score < 100.0, "{score}");
    assert_eq!(asr["tokenizer"], "tailo_initial_final");

    let report = json(d, "report.json");
    assert_eq!(report["input"], 6);
    // c5 has no transcript; c2 is a single character; c1 and c3 carry code-switched noise.
    assert_eq!(report["dropped_adapter_error"], 1);
    assert_eq!(report["filters"][0]["dropped"], 1);
    assert_eq!(report["filters"][1]["dropped"], 2);
    assert_eq!(report["output"], 2);
    let weak = std::fs::read_to_string(d.join("weak.tsv")).unwrap();
    assert!(weak.contains("c0") && weak.contains("c4"));
    assert!(weak.lines().next().unwrap().contains("mt_text"));

    let stats = json(d, "stats.json");
    assert_eq!(stats["en"]["count"], 20);
    assert_eq!(stats["en"]["speaker_count"], 4);
}

#[test]
fn missing_required_parameter_exits_one() {
    let dir = suite_dir();
    let out = run_in(dir.path(), &["mine", "--tgt", "tgt.emb", "--out", "x.tsv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--src"));
}

#[test]
fn unknown_flag_and_subcommand_exit_one() {
    let dir = suite_dir();
    let out = run_in(dir.path(), &["balance", "--counts", "counts.tsv", "--temperature", "2", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--frobnicate"));
    let out = run_in(dir.path(), &["transmogrify"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn invalid_values_exit_one_and_runtime_failures_exit_two() {
    let dir = suite_dir();
    let d = dir.path();
    assert_eq!(run_in(d, &["balance", "--counts", "counts.tsv", "--temperature", "-1"]).status.code(), Some(1));
    assert_eq!(run_in(d, &["quantize", "fit", "--features", "features.emb", "--k", "0", "--out", "x"]).status.code(), Some(1));
    assert_eq!(
        run_in(d, &["mine", "filter-overlap", "--pairs", "p.tsv", "--max-overlap", "1.5", "--out", "x"]).status.code(),
        Some(1)
    );
    assert_eq!(run_in(d, &["bleu", "--hyp", "hyp.txt", "--ref", "units.tsv"]).status.code(), Some(1));
    assert_eq!(run_in(d, &["manifest", "stats", "--in", "missing.tsv"]).status.code(), Some(2));
    let out = run_in(d, &["asr-bleu", "--manifest", "gen.tsv", "--ref", "refs.tsv", "--asr", "mock:fail"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn balance_default_output_and_seed_logging() {
    let dir = suite_dir();
    let out = std::process::Command::new(common::bin())
        .args(["--seed", "17", "balance", "--counts", "counts.tsv", "--temperature", "20"])
        .current_dir(dir.path())
        .env_remove("RUST_LOG")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("dist.json").is_file());
    assert!(String::from_utf8_lossy(&out.stderr).contains("effective seed: 17"));
    assert!(out.stdout.is_empty());
}

#[test]
fn bleu_stdout_flag() {
    let dir = suite_dir();
    let out = run_in(dir.path(), &["bleu", "--hyp", "ref.txt", "--ref", "ref.txt", "--stdout"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["bleu"].as_f64(), Some(100.0));
    assert!(!dir.path().join("bleu.json").exists());
}

#[test]
fn cascade_cache_skips_repeat_invocations() {
    let dir = suite_dir();
    let d = dir.path();
    let spec = r#"{
  "adapters": {"mt": {"kind": "mt", "uri": "exec:tee -a calls.log | tr a-z A-Z"}},
  "stages": [{"adapter": "mt", "in": "text", "out": "mt_text"}]
}"#;
    std::fs::write(d.join("counting.json"), spec).unwrap();
    let args = ["cascade", "run", "--spec", "counting.json", "--in", "pools.tsv", "--out", "o.tsv", "--report", "r.json"];
    let run = || {
        std::process::Command::new(common::bin())
            .args(args)
            .current_dir(d)
            .env("UNITFORGE_CACHE_DIR", d.join("cache"))
            .output()
            .unwrap()
    };
    assert!(run().status.success());
    let first = std::fs::read_to_string(d.join("o.tsv")).unwrap();
    assert_eq!(std::fs::read_to_string(d.join("calls.log")).unwrap().lines().count(), 60);
    assert!(run().status.success());
    assert_eq!(std::fs::read_to_string(d.join("calls.log")).unwrap().lines().count(), 60);
    assert_eq!(std::fs::read_to_string(d.join("o.tsv")).unwrap(), first);
    assert!(first.contains("UTTERANCE NUMBER 7"));
}

#[test]
fn manifest_convert_round_trips() {
    let dir = suite_dir();
    let d = dir.path();
    assert!(run_in(d, &["manifest", "convert", "--in", "pools.tsv", "--out", "p.jsonl"]).status.success());
    assert!(run_in(d, &["manifest", "convert", "--in", "p.jsonl", "--out", "back.tsv"]).status.success());
    assert_eq!(std::fs::read(d.join("pools.tsv")).unwrap(), std::fs::read(d.join("back.tsv")).unwrap());
}
