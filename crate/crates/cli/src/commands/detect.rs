use std::fs;

use anyhow::{Context, Result};
use serde_json::json;
use sil_core::detection::{evaluate_md, load_predictions, write_predictions, Detector, DetectorConfig, LogRegConfig};
use sil_core::metrics::{render_report, ReportFormat};
use sil_core::pipeline::{evaluate_sliced_md, SliceAxis};

use super::{load_corpus_args, load_kb_args, verbalization};
use crate::args::{DetectEvalArgs, DetectPredictArgs, DetectTrainArgs};
use crate::manifest::Ctx;

pub fn train(ctx: &Ctx, args: &DetectTrainArgs) -> Result<()> {
    let corpus = load_corpus_args(ctx, &args.corpus)?;
    let config = DetectorConfig {
        kind: args.kind,
        tokenizer: args.tokenizer,
        context: args.context,
        window: args.window,
        logreg: LogRegConfig { epochs: args.epochs, learning_rate: args.learning_rate, l2: args.l2, threshold: args.threshold, seed: ctx.seed },
        knn_k: args.knn_k,
        knn_metric: args.knn_metric,
        knn_weighting: args.knn_weighting,
    };
    let kb_texts: Option<Vec<String>> = if args.kb_references {
        let kb = load_kb_args(ctx, &args.kb)?;
        Some(kb.verbalize_all(&verbalization(&args.fields)?).into_values().collect())
    } else {
        None
    };
    let detector = Detector::train(&corpus, kb_texts.as_deref(), config.clone())?;
    let text = serde_json::to_string(&detector)? + "\n";
    ctx.write(&args.out, text.as_bytes(), &json!({ "detector": config, "kb_references": args.kb_references }))
}

pub fn predict(ctx: &Ctx, args: &DetectPredictArgs) -> Result<()> {
    let text = fs::read_to_string(ctx.input(&args.model)?).with_context(|| format!("cannot read {}", args.model.display()))?;
    let detector: Detector = serde_json::from_str(&text).with_context(|| format!("{}: not a detector model", args.model.display()))?;
    let corpus = load_corpus_args(ctx, &args.corpus)?;
    let mut predictions = detector.predict(&corpus)?;
    if let Some(path) = &args.fuse {
        let other = load_predictions(ctx.input(path)?)?;
        predictions = predictions.fuse(&other, args.fuse_weight, args.fuse_threshold)?;
    }
    let mut out = Vec::new();
    write_predictions(&predictions, &mut out)?;
    let config = json!({
        "fuse_weight": args.fuse.as_ref().map(|_| args.fuse_weight),
        "fuse_threshold": args.fuse.as_ref().map(|_| args.fuse_threshold),
    });
    ctx.write(&args.out, &out, &config)
}

pub fn eval(ctx: &Ctx, args: &DetectEvalArgs) -> Result<()> {
    let corpus = load_corpus_args(ctx, &args.corpus)?;
    let predictions = load_predictions(ctx.input(&args.predictions)?)?;
    let mut report = evaluate_md(&predictions, &corpus)?.to_report();
    let extra: Vec<SliceAxis> = args.slices.iter().copied().filter(|a| *a != SliceAxis::Language).collect();
    if !extra.is_empty() {
        report.extend(evaluate_sliced_md(&predictions, &corpus, &extra)?);
    }
    let format = match (args.format, &args.out) {
        (Some(f), _) => f,
        (None, Some(_)) => ReportFormat::Json,
        (None, None) => ReportFormat::Table,
    };
    let slices: Vec<&str> = args.slices.iter().map(|s| s.as_str()).collect();
    ctx.emit(args.out.as_deref(), render_report(&report, format).as_bytes(), &json!({ "slices": slices }))
}
