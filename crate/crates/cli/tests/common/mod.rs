//! Shared CLI fixture suite: deterministic inputs for every subcommand and a runner.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unitforge::embed::write_emb1;
use unitforge::{write_manifest, EmbeddingMatrix, Manifest, ManifestFormat, Utterance};

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_unitforge"))
}

pub fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

/// Runs the binary inside `dir` with a clean cache environment.
pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env_remove("UNITFORGE_CACHE_DIR")
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawn unitforge")
}

fn matrix(rng: &mut ChaCha8Rng, rows: usize, dim: usize) -> Vec<f32> {
    (0..rows * dim).map(|_| rng.random_range(-1.0f32..1.0)).collect()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const TAILO: [&str; 10] = [
    "guá sī tâi-uân-lâng",
    "lí hó",
    "kin-á-ji̍t thinn-khì tsin hó",
    "a-bú tshut-khì",
    "ta̍k-ke lâi tsia̍h",
    "gín-á teh tshit-thô",
    "lāu-su kóng-uē",
    "pîng-iú lâi tshuē guá",
    "tiān-náu pháinn-khì",
    "tshiùnn-kua tsin hó-thiann",
];

/// Writes every input file the command list below refers to.
pub fn build_inputs(dir: &Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(2023);

    let features = EmbeddingMatrix::new(1500, 8, matrix(&mut rng, 1500, 8)).unwrap();
    write_emb1(&features, &dir.join("features.emb")).unwrap();
    let mut lengths = String::new();
    for i in 0..30 {
        lengths.push_str(&format!("utt{i:02}\t50\n"));
    }
    write(dir, "lengths.tsv", &lengths);

    let mut units = String::new();
    for i in 0..40 {
        let len = rng.random_range(0..30);
        let seq: Vec<String> = (0..len).map(|_| rng.random_range(0..6u32).to_string()).collect();
        units.push_str(&format!("u{i:02}\t{}\n", seq.join(" ")));
    }
    write(dir, "units.tsv", &units);

    let n = 200;
    let src_data = matrix(&mut rng, n, 16);
    let tgt_data: Vec<f32> = src_data.iter().map(|&v| v + rng.random_range(-0.5f32..0.5)).collect();
    let src = EmbeddingMatrix::new(n, 16, src_data)
        .unwrap()
        .with_ids((0..n).map(|i| format!("s{i:03}")).collect())
        .unwrap();
    let tgt = EmbeddingMatrix::new(n, 16, tgt_data)
        .unwrap()
        .with_ids((0..n).map(|i| format!("t{i:03}")).collect())
        .unwrap();
    write_emb1(&src, &dir.join("src.emb")).unwrap();
    write_emb1(&tgt, &dir.join("tgt.emb")).unwrap();
    let mut segs = String::from("id\taudio_id\tstart_s\tend_s\n");
    let mut gold = String::new();
    for i in 0..n {
        let start = rng.random_range(0.0..120.0f64);
        let len = rng.random_range(1.0..10.0f64);
        segs.push_str(&format!("s{i:03}\tep{}\t{start}\t{}\n", i % 7, start + len));
        gold.push_str(&format!("s{i:03}\tt{i:03}\n"));
    }
    write(dir, "src_segments.tsv", &segs);
    write(dir, "gold.tsv", &gold);

    write(dir, "counts.tsv", "# lang\thours\nen\t900\nnan\t100\nzh\t35.5\n");
    let pools = Manifest::from_records((0..60).map(|i| {
        let lang = ["en", "nan", "zh"][i % 3];
        let mut u = Utterance::new(format!("p{i:02}"), lang);
        u.duration_s = Some(1.5 + i as f64 * 0.25);
        u.speaker = Some(format!("spk{}", i % 4));
        u.text = Some(format!("utterance number {i}"));
        u
    }))
    .unwrap();
    write_manifest(&pools, &dir.join("pools.tsv"), ManifestFormat::Tsv).unwrap();

    let hyps = ["the cat sat on the mat", "a dog ran in the park today", "it is very big , and red .", ""];
    let refs = ["the cat sat on a mat", "a dog ran in the park", "it was very big and red .", "empty hypothesis here"];
    write(dir, "hyp.txt", &(hyps.join("\n") + "\n"));
    write(dir, "ref.txt", &(refs.join("\n") + "\n"));

    let mut generated = Manifest::new();
    let mut references = Manifest::new();
    let mut table = String::new();
    for (i, text) in TAILO.iter().enumerate() {
        let mut g = Utterance::new(format!("g{i:02}"), "nan");
        g.audio_ref = Some(format!("wav/g{i:02}.wav"));
        generated.push(g).unwrap();
        let mut r = Utterance::new(format!("g{i:02}"), "nan");
        r.text = Some(text.to_string());
        references.push(r).unwrap();
        let heard = if i == 4 { text.replace("tsia̍h", "khùn") } else { text.to_string() };
        table.push_str(&format!("wav/g{i:02}.wav\t{heard}\n"));
    }
    write_manifest(&generated, &dir.join("gen.tsv"), ManifestFormat::Tsv).unwrap();
    write_manifest(&references, &dir.join("refs.tsv"), ManifestFormat::Tsv).unwrap();
    write(dir, "transcripts.tsv", &table);

    let mut cascade_in = Manifest::new();
    let mut zh_table = String::new();
    let subtitles = ["今天天氣很好", "我們去公園", "好", "他說了很多話", "你好嗎", "老師來了"];
    for (i, sub) in subtitles.iter().enumerate() {
        let mut u = Utterance::new(format!("c{i}"), "zh");
        u.audio_ref = Some(format!("drama/c{i}.wav"));
        u.text = Some(sub.to_string());
        cascade_in.push(u).unwrap();
        // ASR hears some subtitles exactly, others with code-switched noise; c5 is missing.
        if i != 5 {
            let heard = if i % 2 == 0 { sub.to_string() } else { format!("{sub} ok la so") };
            zh_table.push_str(&format!("drama/c{i}.wav\t{heard}\n"));
        }
    }
    write_manifest(&cascade_in, &dir.join("cascade_in.tsv"), ManifestFormat::Tsv).unwrap();
    write(dir, "zh_asr.tsv", &zh_table);
    write(
        dir,
        "spec.json",
        r#"{
  "adapters": {
    "zh_asr": {"kind": "asr", "uri": "mock:table:zh_asr.tsv"},
    "mt": {"kind": "mt", "uri": "exec:tr a-z A-Z"},
    "t2u": {"kind": "t2u", "uri": "mock:units"}
  },
  "stages": [
    {"adapter": "zh_asr", "in": "audio", "out": "asr_text"},
    {"adapter": "mt", "in": "asr_text", "out": "mt_text"},
    {"adapter": "t2u", "in": "mt_text", "out": "units"}
  ],
  "filters": [
    {"kind": "min_length", "params": {"field": "text", "min_chars": 3}},
    {"kind": "code_switch", "params": {"asr_field": "asr_text", "ref_field": "text", "max_norm_dist": 0.5}}
  ]
}
"#,
    );
}

/// One invocation per subcommand: `(label, args, output files)`.
pub fn commands() -> Vec<(&'static str, Vec<&'static str>, Vec<&'static str>)> {
    vec![
        ("quantize fit", vec!["quantize", "fit", "--features", "features.emb", "--k", "12", "--out", "cb.emb"], vec!["cb.emb", "cb.emb.meta.jsonl"]),
        (
            "quantize assign",
            vec!["quantize", "assign", "--codebook", "cb.emb", "--features", "features.emb", "--lengths", "lengths.tsv", "--out", "assigned.tsv"],
            vec!["assigned.tsv"],
        ),
        ("units dedup", vec!["units", "dedup", "--in", "units.tsv", "--out", "dedup.tsv"], vec!["dedup.tsv"]),
        ("units ctc-collapse", vec!["units", "ctc-collapse", "--in", "units.tsv", "--blank", "0", "--out", "ctc.tsv"], vec!["ctc.tsv"]),
        (
            "embed pool",
            vec!["embed", "pool", "--frames", "features.emb", "--lengths", "lengths.tsv", "--out", "pooled.emb"],
            vec!["pooled.emb", "pooled.emb.ids"],
        ),
        ("embed normalize", vec!["embed", "normalize", "--in", "src.emb", "--out", "src_norm.emb"], vec!["src_norm.emb", "src_norm.emb.ids"]),
        (
            "mine",
            vec![
                "mine", "--src", "src.emb", "--tgt", "tgt.emb", "--knn", "4", "--threshold", "1.0", "--direction", "forward",
                "--src-segments", "src_segments.tsv", "--out", "pairs.tsv",
            ],
            vec!["pairs.tsv"],
        ),
        (
            "mine run",
            vec!["mine", "run", "--src", "src.emb", "--tgt", "tgt.emb", "--direction", "intersect", "--out", "pairs_x.tsv"],
            vec!["pairs_x.tsv"],
        ),
        (
            "mine filter-overlap",
            vec!["mine", "filter-overlap", "--pairs", "pairs.tsv", "--max-overlap", "0.2", "--out", "kept.tsv"],
            vec!["kept.tsv"],
        ),
        (
            "mine simsearch-eval",
            vec!["mine", "simsearch-eval", "--audio", "src.emb", "--text", "tgt.emb", "--gold", "gold.tsv", "--out", "simsearch.json"],
            vec!["simsearch.json"],
        ),
        (
            "balance",
            vec![
                "balance", "--counts", "counts.tsv", "--temperature", "20", "--out", "dist.json", "--schedule-out",
                "schedule.txt", "--pools", "pools.tsv", "--total", "5000",
            ],
            vec!["dist.json", "schedule.txt"],
        ),
        ("bleu", vec!["bleu", "--hyp", "hyp.txt", "--ref", "ref.txt", "--smooth", "exp", "--out", "bleu.json"], vec!["bleu.json"]),
        (
            "asr-bleu",
            vec![
                "asr-bleu", "--manifest", "gen.tsv", "--ref", "refs.tsv", "--asr", "mock:transcripts.tsv", "--tokenizer",
                "tailo_initial_final", "--out", "asr_bleu.json",
            ],
            vec!["asr_bleu.json"],
        ),
        (
            "cascade run",
            vec!["cascade", "run", "--spec", "spec.json", "--in", "cascade_in.tsv", "--out", "weak.tsv", "--report", "report.json"],
            vec!["weak.tsv", "report.json"],
        ),
        ("manifest stats", vec!["manifest", "stats", "--in", "pools.tsv", "--out", "stats.json"], vec!["stats.json"]),
        ("manifest convert", vec!["manifest", "convert", "--in", "pools.tsv", "--out", "pools.jsonl"], vec!["pools.jsonl"]),
    ]
}

/// Runs the whole command list in `dir` with the given thread count and seed.
pub fn run_suite(dir: &Path, threads: usize, seed: u64) -> Result<(), String> {
    let t = threads.to_string();
    let s = seed.to_string();
    for (label, args, _) in commands() {
        let mut full: Vec<&str> = vec!["--threads", &t, "--seed", &s];
        full.extend(args);
        let out = run_in(dir, &full);
        if !out.status.success() {
            return Err(format!("{label} failed ({}): {}", out.status, String::from_utf8_lossy(&out.stderr)));
        }
    }
    Ok(())
}
