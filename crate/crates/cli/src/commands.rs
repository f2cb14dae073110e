use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use unitforge::bleu::{BleuOptions, BleuReport};
use unitforge::cascade::{resolve_adapter, Adapter, AdapterRegistry, CachedAdapter, ContentCache};
use unitforge::embed::{max_pool_segments, read_emb1, write_emb1};
use unitforge::mine::{attach_segments, read_pairs, read_segments, write_pairs, MineParams, DEFAULT_SHARD_ROWS};
use unitforge::quantize::{read_codebook, write_codebook, KMeansParams};
use unitforge::{
    AdapterKind, Codebook32, Embeddings, LanguageCounts, Manifest, ManifestFormat, PipelineSpec, TokenizedCorpus,
    UnitSequence,
};

use crate::files::{
    format_units, read_lengths, read_lines, read_pairs_table, read_text, read_units, to_json, write_json, write_text,
};
use crate::{invalid, Command, EmbedCmd, ManifestCmd, MineCmd, MineRunArgs, QuantizeCmd, UnitsCmd};

pub fn run(command: Command, seed: u64) -> Result<()> {
    match command {
        Command::Quantize(c) => quantize(c, seed),
        Command::Units(c) => units(c),
        Command::Embed(c) => embed(c),
        Command::Mine(m) => match m.command {
            None => mine_run(m.run),
            Some(MineCmd::Run(args)) => mine_run(args),
            Some(c) => mine_other(c),
        },
        Command::Balance(b) => balance(b, seed),
        Command::Bleu(b) => bleu(b),
        Command::AsrBleu(a) => asr_bleu(a),
        Command::Cascade(crate::CascadeCmd::Run {
            spec,
            input,
            out,
            report,
        }) => cascade(&spec, &input, &out, &report),
        Command::Manifest(c) => manifest(c),
    }
}

fn read_matrix(path: &Path) -> Result<Embeddings> {
    read_emb1(path).with_context(|| format!("reading embeddings {}", path.display()))
}

fn read_manifest(path: &Path) -> Result<Manifest> {
    unitforge::read_manifest(path, ManifestFormat::from_path(path)).with_context(|| format!("reading manifest {}", path.display()))
}

fn quantize(cmd: QuantizeCmd, seed: u64) -> Result<()> {
    match cmd {
        QuantizeCmd::Fit {
            features,
            k,
            out,
            max_iters,
            tol,
        } => {
            if k == 0 {
                return Err(invalid("--k must be at least 1"));
            }
            if tol.is_nan() || tol < 0.0 {
                return Err(invalid("--tol must be non-negative"));
            }
            let x = read_matrix(&features)?;
            let params = KMeansParams {
                max_iters,
                tol,
                ..KMeansParams::new(k, seed)
            };
            let cb = unitforge::kmeans_fit(&x, &params)?;
            log::info!(
                "k-means: k={k}, {} iterations, final inertia {}",
                cb.iters_run(),
                cb.final_inertia()
            );
            write_codebook(&cb, &out)?;
        }
        QuantizeCmd::Assign {
            codebook,
            features,
            lengths,
            out,
        } => {
            let cb: Codebook32 = read_codebook(&codebook)?;
            let x = read_matrix(&features)?;
            let units = unitforge::assign_units(&cb, &x)?.into_units();
            let rows: Vec<(String, Vec<u32>)> = match lengths {
                Some(p) => {
                    let lens = read_lengths(&p)?;
                    let total: usize = lens.iter().map(|l| l.1).sum();
                    if total != units.len() {
                        return Err(invalid(format!(
                            "--lengths covers {total} frames but the features have {}",
                            units.len()
                        )));
                    }
                    let mut start = 0;
                    lens.into_iter()
                        .map(|(id, n)| {
                            let seg = units[start..start + n].to_vec();
                            start += n;
                            (id, seg)
                        })
                        .collect()
                }
                None => units.iter().enumerate().map(|(i, &u)| (x.id_of(i), vec![u])).collect(),
            };
            write_text(&out, &format_units(&rows))?;
        }
    }
    Ok(())
}

type UnitRows = Vec<(String, Vec<u32>)>;

fn unit_rows(input: &Path, vocab_size: Option<u32>, blank: Option<u32>) -> Result<(u32, UnitRows)> {
    let rows = read_units(input)?;
    let max_seen = rows.iter().flat_map(|r| r.1.iter().copied()).chain(blank).max();
    let vocab = match vocab_size {
        Some(0) => return Err(invalid("--vocab-size must be positive")),
        Some(v) => v,
        None => max_seen.map_or(1, |m| m + 1),
    };
    if let Some(b) = blank {
        if b >= vocab {
            return Err(invalid(format!("--blank {b} is outside the vocabulary of {vocab} units")));
        }
    }
    Ok((vocab, rows))
}

fn units(cmd: UnitsCmd) -> Result<()> {
    let (input, out, vocab_size, blank) = match cmd {
        UnitsCmd::Dedup { input, out, vocab_size } => (input, out, vocab_size, None),
        UnitsCmd::CtcCollapse {
            input,
            out,
            blank,
            vocab_size,
        } => (input, out, vocab_size, Some(blank)),
    };
    let (vocab, rows) = unit_rows(&input, vocab_size, blank)?;
    let mut result = Vec::with_capacity(rows.len());
    for (id, u) in rows {
        let seq = UnitSequence::new(vocab, u).with_context(|| format!("record {id}"))?;
        let processed = match blank {
            None => unitforge::dedup_units(&seq),
            Some(b) => unitforge::ctc_collapse(&seq, b)?,
        };
        result.push((id, processed.into_units()));
    }
    write_text(&out, &format_units(&result))
}

fn embed(cmd: EmbedCmd) -> Result<()> {
    match cmd {
        EmbedCmd::Pool { frames, lengths, out } => {
            let x = read_matrix(&frames)?;
            let lens = read_lengths(&lengths)?;
            if let Some((id, _)) = lens.iter().find(|l| l.1 == 0) {
                return Err(invalid(format!("utterance {id} has zero frames")));
            }
            write_emb1(&max_pool_segments(&x, &lens)?, &out)?;
        }
        EmbedCmd::Normalize { input, out } => {
            let n = unitforge::l2_normalize(&read_matrix(&input)?);
            if n.zero_rows > 0 {
                log::warn!("{} zero rows left unnormalized", n.zero_rows);
            }
            write_emb1(&n.matrix, &out)?;
        }
    }
    Ok(())
}

fn segments(path: Option<&PathBuf>) -> Result<HashMap<String, unitforge::Segment>> {
    match path {
        Some(p) => Ok(read_segments(&read_text(p)?).with_context(|| format!("reading segments {}", p.display()))?),
        None => Ok(HashMap::new()),
    }
}

fn mine_run(args: MineRunArgs) -> Result<()> {
    let (Some(src), Some(tgt), Some(out)) = (args.src, args.tgt, args.out) else {
        return Err(invalid("mine requires --src, --tgt and --out"));
    };
    if args.knn == 0 {
        return Err(invalid("--knn must be at least 1"));
    }
    if args.threshold.is_some_and(f64::is_nan) {
        return Err(invalid("--threshold must be a number"));
    }
    let params = MineParams {
        k_nn: args.knn,
        threshold: args.threshold.unwrap_or(f64::NEG_INFINITY),
        direction: args.direction,
        margin: args.margin,
        normalize: !args.no_normalize,
        shard_rows: DEFAULT_SHARD_ROWS,
    };
    let mut pairs = unitforge::mine_pairs(&read_matrix(&src)?, &read_matrix(&tgt)?, &params)?;
    attach_segments(&mut pairs, &segments(args.src_segments.as_ref())?, &segments(args.tgt_segments.as_ref())?);
    log::info!("mined {} pairs", pairs.len());
    write_text(&out, &write_pairs(&pairs))
}

fn mine_other(cmd: MineCmd) -> Result<()> {
    match cmd {
        MineCmd::Run(_) => unreachable!("dispatched by the caller"),
        MineCmd::FilterOverlap {
            pairs,
            out,
            max_overlap,
            side,
            src_segments,
            tgt_segments,
        } => {
            if !(0.0..=1.0).contains(&max_overlap) {
                return Err(invalid("--max-overlap must lie in [0, 1]"));
            }
            let mut p = read_pairs(&read_text(&pairs)?)?;
            attach_segments(&mut p, &segments(src_segments.as_ref())?, &segments(tgt_segments.as_ref())?);
            let kept = unitforge::filter_overlap(&p, max_overlap, side)?;
            log::info!("kept {} of {} pairs", kept.len(), p.len());
            write_text(&out, &write_pairs(&kept))
        }
        MineCmd::SimsearchEval {
            audio,
            text,
            gold,
            out,
            knn,
            margin,
        } => {
            if knn == 0 {
                return Err(invalid("--knn must be at least 1"));
            }
            let gold: HashMap<String, String> = read_pairs_table(&gold)?.into_iter().collect();
            let report = unitforge::simsearch_error_rate(&read_matrix(&audio)?, &read_matrix(&text)?, &gold, knn, margin)?;
            log::info!("similarity-search error rate {}", report.formatted());
            write_json(&out, &report)
        }
    }
}

fn balance(args: crate::BalanceArgs, seed: u64) -> Result<()> {
    if !(args.temperature > 0.0 && args.temperature.is_finite()) {
        return Err(invalid("--temperature must be a positive number"));
    }
    let counts = LanguageCounts::parse_tsv(&read_text(&args.counts)?).map_err(|e| invalid(format!("{}: {e}", args.counts.display())))?;
    let dist = unitforge::temperature_distribution(&counts, args.temperature)?;
    write_json(&args.out, &dist)?;
    if let (Some(sched_out), Some(pools), Some(total)) = (args.schedule_out, args.pools, args.total) {
        let m = read_manifest(&pools)?;
        let mut by_lang: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for r in m.records() {
            by_lang.entry(r.lang.clone()).or_default().push(r.id.clone());
        }
        let schedule = unitforge::sample_schedule(&dist, &by_lang, total, seed)?;
        let mut text = schedule.join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        write_text(&sched_out, &text)?;
    }
    Ok(())
}

fn emit_report(report: &BleuReport, out: &Path, stdout: bool) -> Result<()> {
    log::info!("BLEU = {:.2}", report.bleu);
    if stdout {
        print!("{}", to_json(report)?);
        Ok(())
    } else {
        write_json(out, report)
    }
}

fn bleu(args: crate::BleuArgs) -> Result<()> {
    let hyps = read_lines(&args.hyp)?;
    let refs = read_lines(&args.reference)?;
    if hyps.len() != refs.len() {
        return Err(invalid(format!(
            "--hyp has {} lines but --ref has {}",
            hyps.len(),
            refs.len()
        )));
    }
    let report = unitforge::corpus_bleu(
        &TokenizedCorpus::from_texts(&hyps, args.tokenizer),
        &TokenizedCorpus::from_texts(&refs, args.tokenizer),
        &BleuOptions {
            max_n: 4,
            smoothing: args.smooth,
        },
    )?;
    emit_report(&report, &args.out, args.stdout)
}

fn with_cache(adapter: Box<dyn Adapter>) -> Box<dyn Adapter> {
    match ContentCache::from_env() {
        Some(cache) => {
            log::debug!("adapter {} cached under {}", adapter.name(), cache.dir().display());
            Box::new(CachedAdapter::new(adapter, cache))
        }
        None => adapter,
    }
}

fn asr_bleu(args: crate::AsrBleuArgs) -> Result<()> {
    let generated = read_manifest(&args.manifest)?;
    let refs = read_manifest(&args.reference)?;
    let asr = with_cache(resolve_adapter("asr", AdapterKind::Asr, &args.asr, None).map_err(|e| invalid(e.to_string()))?);
    let report = unitforge::asr_bleu(
        &generated,
        &refs,
        asr.as_ref(),
        args.tokenizer,
        &BleuOptions {
            max_n: 4,
            smoothing: args.smooth,
        },
    )?;
    emit_report(&report, &args.out, args.stdout)
}

fn cascade(spec_path: &Path, input: &Path, out: &Path, report: &Path) -> Result<()> {
    let spec = PipelineSpec::read(spec_path).map_err(|e| invalid(e.to_string()))?;
    let base = spec_path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut registry = AdapterRegistry::new();
    for (name, decl) in &spec.adapters {
        let a = resolve_adapter(name, decl.kind, &decl.uri, base).map_err(|e| invalid(format!("adapter {name}: {e}")))?;
        registry.insert(name.clone(), with_cache(a));
    }
    let src = read_manifest(input)?;
    let result = unitforge::run_cascade(&src, &spec, &registry).map_err(|e| match e {
        unitforge::cascade::CascadeError::Io { .. } | unitforge::cascade::CascadeError::Corpus(_) => anyhow::Error::new(e),
        other => invalid(other.to_string()),
    })?;
    let r = &result.report;
    log::info!(
        "cascade: {} in, {} out, {} adapter errors",
        r.input,
        r.output,
        r.dropped_adapter_error
    );
    unitforge::write_manifest(&result.manifest, out, ManifestFormat::from_path(out))?;
    write_json(report, &result.report)
}

fn manifest(cmd: ManifestCmd) -> Result<()> {
    match cmd {
        ManifestCmd::Stats { input, out, stdout } => {
            let stats = unitforge::manifest_stats(&read_manifest(&input)?);
            if stdout {
                print!("{}", to_json(&stats)?);
                Ok(())
            } else {
                write_json(&out, &stats)
            }
        }
        ManifestCmd::Convert { input, out, from, to } => {
            let m = unitforge::read_manifest(&input, from.unwrap_or_else(|| ManifestFormat::from_path(&input)))?;
            unitforge::write_manifest(&m, &out, to.unwrap_or_else(|| ManifestFormat::from_path(&out)))?;
            Ok(())
        }
    }
}

