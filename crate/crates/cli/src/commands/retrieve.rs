use std::fs;

use anyhow::{Context, Result};
use serde_json::{json, Value};
use sil_core::corpus::load_corpus;
use sil_core::detection::{load_predictions, write_predictions, Detector, Predictions};
use sil_core::kb::load_kb;
use sil_core::metrics::{load_qrels, render_report, write_qrels, EvalReport, Qrels, ReportFormat};
use sil_core::pipeline::{
    evaluate_ed, evaluate_sliced_ed, recall_curve, retrieve_gold, retrieve_sentences, run_smp, write_curve, EdBackend, MdSource, SmpConfig,
};
use sil_core::retrieval::{build_bm25, load_run, write_run, Bm25Params};

use super::{build_engine, load_corpus_args, load_kb_args, metric_config, usage, verbalization, EngineSpec};
use crate::args::{AggregateArgs, DenseArgs, RetrieveEvalArgs, RetrieveIndexArgs, RetrieveQueryArgs, SmpRunArgs};
use crate::manifest::Ctx;

fn engine_config(backend: EdBackend, fields: &crate::args::FieldArgs, tokenizer: &sil_core::features::Tokenizer, dense: &DenseArgs) -> Value {
    match backend {
        EdBackend::Bm25 => json!({ "fields": fields.fields, "separator": fields.separator, "tokenizer": tokenizer.describe() }),
        EdBackend::Dense => json!({
            "fields": fields.fields,
            "separator": fields.separator,
            "hash_dim": dense.hash_dim,
            "hash_tokenizer": dense.hash_tokenizer.describe(),
            "item_embeddings": dense.item_embeddings.is_some(),
            "query_embeddings": dense.query_embeddings.is_some(),
        }),
    }
}

pub fn index(ctx: &Ctx, args: &RetrieveIndexArgs) -> Result<()> {
    let kb = load_kb_args(ctx, &args.kb)?;
    let params = Bm25Params { k1: args.k1, b: args.b };
    params.validate().map_err(|e| usage(e.to_string()))?;
    let index = build_bm25(&kb.verbalize_all(&verbalization(&args.fields)?), args.tokenizer, params)?;
    log::info!("{} items, {} terms", index.doc_count(), index.vocabulary_size());
    let text = serde_json::to_string(&index)? + "\n";
    let config = json!({ "fields": args.fields.fields, "separator": args.fields.separator, "tokenizer": args.tokenizer.describe(), "k1": args.k1, "b": args.b });
    ctx.write(&args.out, text.as_bytes(), &config)
}

pub fn query(ctx: &Ctx, args: &RetrieveQueryArgs) -> Result<()> {
    let corpus = load_corpus_args(ctx, &args.corpus)?;
    let kb = load_kb_args(ctx, &args.kb)?;
    let e = &args.engine;
    let store = build_engine(
        ctx,
        &kb,
        EngineSpec { backend: e.backend, index: e.index.as_deref(), fields: &e.fields, tokenizer: e.tokenizer, dense: &e.dense },
    )?;
    let mut cfg = SmpConfig::new(args.k).map_err(|e| usage(e.to_string()))?;
    cfg.ed_backend = e.backend;
    cfg.filter_citations = !args.no_filter;
    cfg.context_mode = args.context;
    let engine = store.engine();
    let rankings = match &args.predictions {
        Some(path) => {
            let md = load_predictions(ctx.input(path)?)?;
            retrieve_sentences(&corpus, &kb, &engine, &cfg, |d, s| md.get(&d.key(s.idx)).is_some_and(|p| p.label))?
        }
        None => retrieve_gold(&corpus, &kb, &engine, &cfg)?,
    };
    let mut config = json!({ "smp": cfg, "engine": engine_config(e.backend, &e.fields, &e.tokenizer, &e.dense) });
    config["md_predictions"] = json!(args.predictions.is_some());
    let mut out = Vec::new();
    write_run(&rankings, &mut out)?;
    ctx.write(&args.out, &out, &config)?;
    if let Some(path) = &args.qrels_out {
        let mut out = Vec::new();
        write_qrels(&Qrels::from_corpus(&corpus), &mut out)?;
        ctx.write(path, &out, &config)?;
    }
    Ok(())
}

pub fn eval(ctx: &Ctx, args: &RetrieveEvalArgs) -> Result<()> {
    let (cfg, metrics) = metric_config(&args.metrics)?;
    let rankings = load_run(ctx.input(&args.run)?)?;
    let qrels = load_qrels(ctx.input(&args.qrels)?)?;
    let kb = match &args.kb {
        Some(path) => Some(load_kb(ctx.input(path)?)?),
        None if cfg.relaxed_radius > 0 => return Err(usage("--relaxed-radius needs --kb")),
        None => None,
    };
    let mut report = evaluate_ed(&rankings, &qrels, kb.as_ref(), &cfg, &metrics)?;
    if !args.slices.is_empty() {
        let path = args.corpus.as_deref().ok_or_else(|| usage("--slices needs --corpus"))?;
        let corpus = load_corpus(ctx.input(path)?)?;
        report.extend(evaluate_sliced_ed(&rankings, &corpus, kb.as_ref(), &cfg, &metrics, &args.slices)?);
    }
    let config = json!({ "metric": cfg, "metrics": metrics, "slices": args.slices.iter().map(|s| s.as_str()).collect::<Vec<_>>() });
    let text = match (args.format, &args.out, report.entries.as_slice()) {
        (None, None, [only]) => format!("{:?}\n", only.value),
        (format, out, _) => {
            let default = if out.is_some() { ReportFormat::Json } else { ReportFormat::Table };
            render_report(&report, format.unwrap_or(default))
        }
    };
    ctx.emit(args.out.as_deref(), text.as_bytes(), &config)
}

pub fn smp(ctx: &Ctx, args: &SmpRunArgs) -> Result<()> {
    let (metric, metrics) = metric_config(&args.metrics)?;
    let cfg = SmpConfig { md_source: args.md, ed_backend: args.ed, metric, metrics, filter_citations: !args.no_filter, context_mode: args.context };
    let corpus = load_corpus_args(ctx, &args.corpus)?;
    let kb = load_kb_args(ctx, &args.kb)?;
    let md: Option<Predictions> = match args.md {
        MdSource::Oracle => None,
        MdSource::Model => {
            let path = args.model.as_deref().ok_or_else(|| usage("--md model needs --model"))?;
            let text = fs::read_to_string(ctx.input(path)?).with_context(|| format!("cannot read {}", path.display()))?;
            let detector: Detector = serde_json::from_str(&text).with_context(|| format!("{}: not a detector model", path.display()))?;
            Some(detector.predict(&corpus)?)
        }
        MdSource::File => {
            let path = args.predictions.as_deref().ok_or_else(|| usage("--md file needs --predictions"))?;
            Some(load_predictions(ctx.input(path)?)?)
        }
    };
    let store = build_engine(
        ctx,
        &kb,
        EngineSpec { backend: args.ed, index: args.index.as_deref(), fields: &args.fields, tokenizer: args.tokenizer, dense: &args.dense },
    )?;
    let output = run_smp(&corpus, &kb, &store.engine(), &cfg, md.as_ref())?;
    log::info!("{} queries, {} spurious", output.rankings.len(), output.spurious);

    let config = json!({ "smp": cfg, "engine": engine_config(args.ed, &args.fields, &args.tokenizer, &args.dense) });
    let dir = &args.out_dir;
    let mut run = Vec::new();
    write_run(&output.rankings, &mut run)?;
    ctx.write(&dir.join("run.tsv"), &run, &config)?;
    let mut qrels = Vec::new();
    write_qrels(&Qrels::from_corpus(&corpus), &mut qrels)?;
    ctx.write(&dir.join("qrels.tsv"), &qrels, &config)?;
    ctx.write(&dir.join("report.json"), render_report(&output.ed, ReportFormat::Json).as_bytes(), &config)?;
    ctx.write(&dir.join("diagnostics.json"), render_report(&output.diagnostics, ReportFormat::Json).as_bytes(), &config)?;
    if let (MdSource::Model, Some(p)) = (args.md, &md) {
        let mut out = Vec::new();
        write_predictions(p, &mut out)?;
        ctx.write(&dir.join("predictions.tsv"), &out, &config)?;
    }
    let mut summary = output.ed.clone();
    summary.extend(EvalReport { entries: output.diagnostics.entries.iter().filter(|e| e.slice.is_none()).cloned().collect() });
    ctx.emit(None, render_report(&summary, ReportFormat::Table).as_bytes(), &Value::Null)
}

pub fn aggregate(ctx: &Ctx, args: &AggregateArgs) -> Result<()> {
    if args.max_cutoff == 0 {
        return Err(usage("--max-cutoff must be at least 1"));
    }
    let rankings = load_run(ctx.input(&args.run)?)?;
    let corpus = load_corpus_args(ctx, &args.corpus)?;
    let curve = recall_curve(&rankings, &corpus, args.max_cutoff, args.fusion)?;
    let mut out = Vec::new();
    write_curve(&curve, &mut out)?;
    let config = json!({ "max_cutoff": args.max_cutoff, "fusion": args.fusion });
    ctx.emit(args.out.as_deref(), &out, &config)
}
