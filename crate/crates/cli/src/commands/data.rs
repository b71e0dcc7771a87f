use std::collections::BTreeSet;
use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;
use sil_core::corpus::{cohens_kappa, corpus_stats, krippendorff_alpha, load_corpus, load_split};
use sil_core::kb::{dedup_items, write_kb};
use sil_core::metrics::{render_report, EvalReport};

use super::{load_kb_args, verbalization};
use crate::args::{AlphaArgs, KappaArgs, KbDedupArgs, KbIndexArgs, ReportArgs, StatsArgs, StatsFormat};
use crate::manifest::Ctx;

pub fn stats(ctx: &Ctx, args: &StatsArgs) -> Result<()> {
    let corpus_path = ctx.resolve(args.corpus.corpus.as_deref(), "corpus.jsonl", "--corpus")?;
    let split_path = ctx.resolve(args.corpus.split.as_deref(), "split.json", "--split")?;
    let corpus = load_corpus(ctx.input(&corpus_path)?)?;
    let split = load_split(ctx.input(&split_path)?, args.corpus.split_name)?;
    if let Err(e) = split.check_covers(&corpus) {
        log::warn!("{e}");
    }
    let stats = corpus_stats(&corpus, &split)?;
    let text = match args.format {
        StatsFormat::Table => stats.to_string(),
        StatsFormat::Json => serde_json::to_string_pretty(&stats)? + "\n",
    };
    ctx.emit(args.out.as_deref(), text.as_bytes(), &json!({ "format": format!("{:?}", args.format).to_lowercase() }))
}

fn read(ctx: &Ctx, path: &std::path::Path) -> Result<String> {
    fs::read_to_string(ctx.input(path)?).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_bit(s: &str, origin: &str, line: usize) -> Result<bool> {
    match s.trim() {
        "1" => Ok(true),
        "0" => Ok(false),
        other => bail!("{origin}:{line}: expected 0 or 1, found `{other}`"),
    }
}

/// Two label columns per line: `0|1<TAB>0|1`.
pub fn kappa(ctx: &Ctx, args: &KappaArgs) -> Result<()> {
    let origin = args.input.display().to_string();
    let text = read(ctx, &args.input)?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 {
            bail!("{origin}:{}: expected 2 columns, found {}", i + 1, cols.len());
        }
        a.push(parse_bit(cols[0], &origin, i + 1)?);
        b.push(parse_bit(cols[1], &origin, i + 1)?);
    }
    let value = cohens_kappa(&a, &b).with_context(|| origin.clone())?;
    let out = serde_json::to_string_pretty(&json!({ "statistic": "cohens_kappa", "value": value, "n": a.len() }))? + "\n";
    match &args.out {
        Some(p) => ctx.write(p, out.as_bytes(), &json!({})),
        None => ctx.emit(None, format!("{value}\n").as_bytes(), &json!({})),
    }
}

/// One JSON array per annotator line; each unit is an array of item ids or
/// `null` for a missing judgement.
pub fn alpha(ctx: &Ctx, args: &AlphaArgs) -> Result<()> {
    let origin = args.input.display().to_string();
    let text = read(ctx, &args.input)?;
    let mut data: Vec<Vec<Option<BTreeSet<String>>>> = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row: Vec<Option<BTreeSet<String>>> = serde_json::from_str(line).map_err(|e| anyhow!("{origin}:{}: {e}", i + 1))?;
        if let Some(first) = data.first() {
            if first.len() != row.len() {
                bail!("{origin}:{}: {} units, expected {}", i + 1, row.len(), first.len());
            }
        }
        data.push(row);
    }
    let value = krippendorff_alpha(&data, args.distance).with_context(|| origin.clone())?;
    let distance = format!("{:?}", args.distance).to_lowercase();
    let out = serde_json::to_string_pretty(&json!({
        "statistic": "krippendorff_alpha",
        "distance": distance,
        "value": value,
        "annotators": data.len(),
        "units": data.first().map_or(0, Vec::len),
    }))? + "\n";
    match &args.out {
        Some(p) => ctx.write(p, out.as_bytes(), &json!({ "distance": distance })),
        None => ctx.emit(None, format!("{value}\n").as_bytes(), &json!({})),
    }
}

pub fn kb_index(ctx: &Ctx, args: &KbIndexArgs) -> Result<()> {
    let kb = load_kb_args(ctx, &args.kb)?;
    let spec = verbalization(&args.fields)?;
    let mut out = String::new();
    for (id, text) in kb.verbalize_all(&spec) {
        let flat: String = text.chars().map(|c| if c == '\t' || c == '\n' { ' ' } else { c }).collect();
        out.push_str(&format!("{id}\t{flat}\n"));
    }
    ctx.emit(args.out.as_deref(), out.as_bytes(), &json!({ "fields": args.fields.fields, "separator": args.fields.separator }))
}

pub fn kb_dedup(ctx: &Ctx, args: &KbDedupArgs) -> Result<()> {
    let kb = load_kb_args(ctx, &args.kb)?;
    let deduped = dedup_items(&kb);
    log::info!("{} of {} items kept", deduped.len(), kb.len());
    let mut out = Vec::new();
    write_kb(&deduped, &mut out)?;
    ctx.write(&args.out, &out, &json!({}))
}

pub fn report(ctx: &Ctx, args: &ReportArgs) -> Result<()> {
    let mut merged = EvalReport::default();
    for path in &args.input {
        let report = EvalReport::from_json(&read(ctx, path)?).with_context(|| path.display().to_string())?;
        merged.extend(report);
    }
    if !args.metric.is_empty() {
        merged.entries.retain(|e| args.metric.contains(&e.metric));
    }
    let text = render_report(&merged, args.format);
    ctx.emit(args.out.as_deref(), text.as_bytes(), &json!({ "metric": args.metric }))
}
