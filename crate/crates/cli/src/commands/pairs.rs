use anyhow::Result;
use serde_json::json;
use sil_core::corpus::{load_corpus, SplitPart};
use sil_core::pairs::{generate_mp, generate_sp, load_generated, split_pairs, write_pairs, PairGenConfig, PairRecord};

use super::{load_kb_args, part_ids, part_names, usage};
use crate::args::PairsArgs;
use crate::manifest::Ctx;

fn parse_ratio(s: &str) -> Result<(u64, u64)> {
    let bad = || usage(format!("--split-ratio must look like 200:15, got `{s}`"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

/// Sentences of the evaluation parts (test sets unless `--part` says
/// otherwise), or of the whole corpus with `--dedup-all`.
fn dedup_sentences(ctx: &Ctx, args: &PairsArgs) -> Result<Vec<String>> {
    let path = ctx.resolve(args.corpus.corpus.as_deref(), "corpus.jsonl", "--corpus")?;
    let corpus = load_corpus(ctx.input(&path)?)?;
    let corpus = if args.dedup_all {
        corpus
    } else {
        let parts = if args.corpus.part.is_empty() { vec![SplitPart::TestEn, SplitPart::TestDe] } else { args.corpus.part.clone() };
        log::info!("dedup against {}", part_names(&parts));
        corpus.subset(&part_ids(ctx, &args.corpus, &parts)?)?
    };
    Ok(corpus.sentences().map(|(_, s)| s.text.clone()).collect())
}

fn finish(ctx: &Ctx, args: &PairsArgs, cfg: &PairGenConfig, pairs: &[PairRecord]) -> Result<()> {
    let (train, val) = split_pairs(pairs, cfg.split_ratio, cfg.seed)?;
    log::info!("{} pairs: {} train, {} validation", pairs.len(), train.len(), val.len());
    let config = json!({
        "mp_size": cfg.mp_size,
        "sp_size": cfg.sp_size,
        "min_levenshtein": cfg.min_levenshtein,
        "split_ratio": cfg.split_ratio,
        "dedup_sentences": cfg.dedup_corpus.len(),
        "dedup_all": args.dedup_all,
        "generated": pairs.len(),
    });
    for (path, part) in [(&args.out_train, &train), (&args.out_val, &val)] {
        let mut out = Vec::new();
        write_pairs(part, &mut out)?;
        ctx.write(path, &out, &config)?;
    }
    Ok(())
}

fn config(ctx: &Ctx, args: &PairsArgs) -> Result<PairGenConfig> {
    let defaults = PairGenConfig::default();
    Ok(PairGenConfig {
        seed: ctx.seed,
        mp_size: args.size.unwrap_or(defaults.mp_size),
        sp_size: args.size.unwrap_or(defaults.sp_size),
        dedup_corpus: dedup_sentences(ctx, args)?,
        min_levenshtein: args.min_levenshtein,
        split_ratio: parse_ratio(&args.split_ratio)?,
    })
}

pub fn mp(ctx: &Ctx, args: &PairsArgs) -> Result<()> {
    if args.generated.is_some() {
        return Err(usage("--generated applies to `pairs sp` only"));
    }
    let kb = load_kb_args(ctx, &args.kb)?;
    let cfg = config(ctx, args)?;
    finish(ctx, args, &cfg, &generate_mp(&kb, &cfg))
}

pub fn sp(ctx: &Ctx, args: &PairsArgs) -> Result<()> {
    let path = args.generated.as_deref().ok_or_else(|| usage("`pairs sp` needs --generated"))?;
    let generated = load_generated(ctx.input(path)?)?;
    let kb = load_kb_args(ctx, &args.kb)?;
    let cfg = config(ctx, args)?;
    finish(ctx, args, &cfg, &generate_sp(&generated, &kb, &cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("200:15").unwrap(), (200, 15));
        assert!(parse_ratio("200").is_err());
        assert!(parse_ratio("0:1").is_err());
    }
}
