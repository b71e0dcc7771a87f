mod data;
mod detect;
mod pairs;
mod retrieve;

use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::Result;
use sil_core::corpus::{load_corpus, load_split, Corpus, SplitPart};
use sil_core::features::{hash_embed, load_embeddings, EmbeddingStore, Tokenizer};
use sil_core::kb::{load_kb, KnowledgeBase, VerbalizationSpec};
use sil_core::metrics::{Metric, MetricConfig};
use sil_core::pipeline::{EdBackend, EdEngine, QueryEncoder};
use sil_core::retrieval::{build_bm25, Bm25Index, Bm25Params, DenseIndex};

use crate::args::{
    AgreementCommand, Cli, Command, CorpusArgs, DenseArgs, DetectCommand, FieldArgs, KbArgs, KbCommand, MetricArgs, PairsCommand, RetrieveCommand,
    SmpCommand,
};
use crate::manifest::Ctx;
use crate::UsageError;

pub fn run(cli: Cli, argv: Vec<String>, config_file: Option<PathBuf>) -> Result<()> {
    let ctx = Ctx::new(cli.command.name(), argv, cli.seed, cli.data_dir.clone());
    if let Some(path) = &config_file {
        ctx.input(path)?;
    }
    match &cli.command {
        Command::Stats(a) => data::stats(&ctx, a),
        Command::Agreement(AgreementCommand::Kappa(a)) => data::kappa(&ctx, a),
        Command::Agreement(AgreementCommand::Alpha(a)) => data::alpha(&ctx, a),
        Command::Kb(KbCommand::Index(a)) => data::kb_index(&ctx, a),
        Command::Kb(KbCommand::Dedup(a)) => data::kb_dedup(&ctx, a),
        Command::Detect(DetectCommand::Train(a)) => detect::train(&ctx, a),
        Command::Detect(DetectCommand::Predict(a)) => detect::predict(&ctx, a),
        Command::Detect(DetectCommand::Eval(a)) => detect::eval(&ctx, a),
        Command::Retrieve(RetrieveCommand::Index(a)) => retrieve::index(&ctx, a),
        Command::Retrieve(RetrieveCommand::Query(a)) => retrieve::query(&ctx, a),
        Command::Retrieve(RetrieveCommand::Eval(a)) => retrieve::eval(&ctx, a),
        Command::Smp(SmpCommand::Run(a)) => retrieve::smp(&ctx, a),
        Command::Aggregate(a) => retrieve::aggregate(&ctx, a),
        Command::Pairs(PairsCommand::Mp(a)) => pairs::mp(&ctx, a),
        Command::Pairs(PairsCommand::Sp(a)) => pairs::sp(&ctx, a),
        Command::Report(a) => data::report(&ctx, a),
    }
}

/// The corpus, narrowed to the selected split parts if any.
fn load_corpus_args(ctx: &Ctx, args: &CorpusArgs) -> Result<Corpus> {
    let path = ctx.resolve(args.corpus.as_deref(), "corpus.jsonl", "--corpus")?;
    let corpus = load_corpus(ctx.input(&path)?)?;
    if args.part.is_empty() {
        return Ok(corpus);
    }
    let ids = part_ids(ctx, args, &args.part)?;
    let subset = corpus.subset(&ids)?;
    log::info!("{} documents in {}", subset.len(), part_names(&args.part));
    Ok(subset)
}

fn part_ids(ctx: &Ctx, args: &CorpusArgs, parts: &[SplitPart]) -> Result<BTreeSet<String>> {
    let path = ctx.resolve(args.split.as_deref(), "split.json", "--split")?;
    let split = load_split(ctx.input(&path)?, args.split_name)?;
    Ok(parts.iter().flat_map(|p| split.part(*p).iter().cloned()).collect())
}

fn part_names(parts: &[SplitPart]) -> String {
    parts.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(",")
}

fn load_kb_args(ctx: &Ctx, args: &KbArgs) -> Result<KnowledgeBase> {
    let path = ctx.resolve(args.kb.as_deref(), "kb.jsonl", "--kb")?;
    let kb = load_kb(ctx.input(&path)?)?;
    log::info!("{kb}");
    Ok(kb)
}

fn verbalization(args: &FieldArgs) -> Result<VerbalizationSpec> {
    VerbalizationSpec::parse_fields(&args.fields, &args.separator).map_err(|e| UsageError(e.to_string()).into())
}

fn metric_config(args: &MetricArgs) -> Result<(MetricConfig, Vec<Metric>)> {
    let mut cfg = MetricConfig::new(args.k).map_err(|e| UsageError(e.to_string()))?.with_variant(args.ap_variant);
    cfg.relaxed_radius = args.relaxed_radius;
    let metrics = if args.metric.is_empty() { Metric::REPORTED.to_vec() } else { args.metric.clone() };
    Ok((cfg, metrics))
}

fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

/// Owned retrieval backend from which an [`EdEngine`] is borrowed.
enum EngineStore {
    Bm25(Bm25Index),
    Dense { index: DenseIndex, queries: Option<EmbeddingStore>, dim: usize, tokenizer: Tokenizer },
}

impl EngineStore {
    fn engine(&self) -> EdEngine<'_> {
        match self {
            EngineStore::Bm25(index) => EdEngine::Bm25(index),
            EngineStore::Dense { index, queries, dim, tokenizer } => EdEngine::Dense {
                index,
                encoder: match queries {
                    Some(store) => QueryEncoder::Precomputed(store),
                    None => QueryEncoder::Hashed { dim: *dim, tokenizer: *tokenizer },
                },
            },
        }
    }
}

struct EngineSpec<'a> {
    backend: EdBackend,
    index: Option<&'a std::path::Path>,
    fields: &'a FieldArgs,
    tokenizer: Tokenizer,
    dense: &'a DenseArgs,
}

fn build_engine(ctx: &Ctx, kb: &KnowledgeBase, spec: EngineSpec<'_>) -> Result<EngineStore> {
    match spec.backend {
        EdBackend::Bm25 => {
            let index = match spec.index {
                Some(path) => {
                    let text = std::fs::read_to_string(ctx.input(path)?).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
                    serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?
                }
                None => build_bm25(&kb.verbalize_all(&verbalization(spec.fields)?), spec.tokenizer, Bm25Params::default())?,
            };
            Ok(EngineStore::Bm25(index))
        }
        EdBackend::Dense => {
            let d = spec.dense;
            let index = match &d.item_embeddings {
                Some(path) => {
                    let store = load_embeddings(ctx.input(path)?)?;
                    let mut index = DenseIndex::new(store.dim());
                    for (id, v) in store.iter() {
                        index.insert(id.clone(), v)?;
                    }
                    index
                }
                None => {
                    let mut index = DenseIndex::new(d.hash_dim);
                    for (id, text) in kb.verbalize_all(&verbalization(spec.fields)?) {
                        index.insert(id, &hash_embed(&text, d.hash_dim, &d.hash_tokenizer)?)?;
                    }
                    index
                }
            };
            let queries = match &d.query_embeddings {
                Some(path) => Some(load_embeddings(ctx.input(path)?)?),
                None => None,
            };
            Ok(EngineStore::Dense { index, queries, dim: d.hash_dim, tokenizer: d.hash_tokenizer })
        }
    }
}
