//! The sequential pipeline: mention detection selects sentences, entity
//! disambiguation ranks candidate items for each of them, and the result
//! is scored against gold with MD errors propagated.

mod aggregate;
mod slices;

use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, Sentence};
use crate::detection::{evaluate_md, expand_context, ClassificationReport, ContextMode, Predictions};
use crate::error::{Error, Result};
use crate::features::{hash_embed, EmbeddingStore, Tokenizer};
use crate::kb::{filter_by_citations, KnowledgeBase};
use crate::metrics::{judge_run, mean_of, EvalReport, Judged, Metric, MetricConfig, Qrels, ReportEntry};
use crate::retrieval::{relaxed_hits, Bm25Index, DenseIndex, Ranking};

pub use crate::metrics::{render_report, ReportFormat};
pub use aggregate::{aggregate_document, document_recall, recall_curve, write_curve, CurvePoint, DocAggregation, Fusion};
pub use slices::{evaluate_sliced_ed, evaluate_sliced_md, SliceAxis, SliceKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MdSource {
    /// Gold labels stand in for the detector.
    Oracle,
    Model,
    File,
}

impl FromStr for MdSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "oracle" => Ok(MdSource::Oracle),
            "model" => Ok(MdSource::Model),
            "file" => Ok(MdSource::File),
            other => Err(Error::invalid(format!("unknown MD source `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdBackend {
    Bm25,
    Dense,
}

impl FromStr for EdBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bm25" => Ok(EdBackend::Bm25),
            "dense" => Ok(EdBackend::Dense),
            other => Err(Error::invalid(format!("unknown ED backend `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmpConfig {
    pub md_source: MdSource,
    pub ed_backend: EdBackend,
    pub metric: MetricConfig,
    pub metrics: Vec<Metric>,
    pub filter_citations: bool,
    /// Context appended to ED query text.
    pub context_mode: ContextMode,
}

impl SmpConfig {
    pub fn new(k: usize) -> Result<Self> {
        Ok(Self {
            md_source: MdSource::Oracle,
            ed_backend: EdBackend::Bm25,
            metric: MetricConfig::new(k)?,
            metrics: Metric::REPORTED.to_vec(),
            filter_citations: true,
            context_mode: ContextMode::None,
        })
    }

    pub fn k(&self) -> usize {
        self.metric.k
    }
}

/// How dense queries obtain their vectors.
#[derive(Debug, Clone)]
pub enum QueryEncoder<'a> {
    /// Vectors keyed by query id (`doc_id#sent_idx`).
    Precomputed(&'a EmbeddingStore),
    Hashed {
        dim: usize,
        tokenizer: Tokenizer,
    },
}

/// A ready-to-query ED backend.
#[derive(Debug, Clone)]
pub enum EdEngine<'a> {
    Bm25(&'a Bm25Index),
    Dense { index: &'a DenseIndex, encoder: QueryEncoder<'a> },
}

impl EdEngine<'_> {
    pub fn backend(&self) -> EdBackend {
        match self {
            EdEngine::Bm25(_) => EdBackend::Bm25,
            EdEngine::Dense { .. } => EdBackend::Dense,
        }
    }

    pub fn query(&self, query_id: &str, text: &str, candidates: &std::collections::BTreeSet<String>, k: usize) -> Result<Ranking> {
        match self {
            EdEngine::Bm25(index) => index.query(query_id, text, Some(candidates), k),
            EdEngine::Dense { index, encoder } => {
                let owned;
                let vector = match encoder {
                    QueryEncoder::Precomputed(store) => {
                        store.get(query_id).ok_or_else(|| Error::Unknown { kind: "query embedding", id: query_id.to_string() })?
                    }
                    QueryEncoder::Hashed { dim, tokenizer } => {
                        owned = hash_embed(text, *dim, tokenizer)?;
                        &owned
                    }
                };
                index.query(query_id, vector, Some(candidates), k)
            }
        }
    }
}

/// Runs ED for every sentence accepted by `select`, documents in parallel.
/// Output follows corpus order.
pub fn retrieve_sentences<F>(corpus: &Corpus, kb: &KnowledgeBase, engine: &EdEngine<'_>, cfg: &SmpConfig, select: F) -> Result<Vec<Ranking>>
where
    F: Fn(&Document, &Sentence) -> bool + Sync,
{
    let per_doc: Vec<Vec<Ranking>> = corpus
        .documents()
        .par_iter()
        .map(|doc| {
            let chosen: Vec<&Sentence> = doc.sentences.iter().filter(|s| select(doc, s)).collect();
            if chosen.is_empty() {
                return Ok(Vec::new());
            }
            let candidates = filter_by_citations(kb, doc, cfg.filter_citations);
            chosen
                .into_iter()
                .map(|s| {
                    let text = expand_context(doc, s.idx, cfg.context_mode)?;
                    engine.query(&doc.key(s.idx).to_string(), &text, &candidates.items, cfg.k())
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_doc.into_iter().flatten().collect())
}

/// Standalone ED: rankings for every gold-positive sentence.
pub fn retrieve_gold(corpus: &Corpus, kb: &KnowledgeBase, engine: &EdEngine<'_>, cfg: &SmpConfig) -> Result<Vec<Ranking>> {
    retrieve_sentences(corpus, kb, engine, cfg, |_, s| s.label)
}

fn relaxed_name(metric: Metric, radius: u64) -> String {
    format!("{}_relaxed_r{radius}", metric.as_str())
}

/// Judgments with lenient neighbor crediting, same skipping rules as
/// [`judge_run`].
pub fn judge_run_relaxed(rankings: &[Ranking], qrels: &Qrels, radius: u64, kb: &KnowledgeBase) -> Result<(BTreeMap<String, Judged>, usize)> {
    let (strict, skipped) = judge_run(rankings, qrels)?;
    let by_query: BTreeMap<&str, &Ranking> = rankings.iter().map(|r| (r.query_id.as_str(), r)).collect();
    let mut out = BTreeMap::new();
    for query in strict.keys() {
        let gold = qrels.get(query).expect("judged queries come from the qrels");
        let hits = match by_query.get(query.as_str()) {
            Some(r) => relaxed_hits(r, gold, radius, kb)?,
            None => Vec::new(),
        };
        out.insert(query.clone(), Judged::new(hits, gold.len())?);
    }
    Ok((out, skipped))
}

/// Pooled ED rows, one per metric; with a nonzero relaxed radius the
/// lenient rows follow, named `<metric>_relaxed_r<radius>`. `kb` is needed
/// only for lenient rows.
pub fn evaluate_ed(rankings: &[Ranking], qrels: &Qrels, kb: Option<&KnowledgeBase>, cfg: &MetricConfig, metrics: &[Metric]) -> Result<EvalReport> {
    let mut report = EvalReport::default();
    let (judged, skipped) = judge_run(rankings, qrels)?;
    let judged: Vec<Judged> = judged.into_values().collect();
    for &m in metrics {
        report.push(ReportEntry::new(m.as_str(), cfg.k, m.variant_label(cfg), mean_of(&judged, m, cfg), judged.len(), skipped));
    }
    if cfg.relaxed_radius > 0 {
        let kb = kb.ok_or_else(|| Error::invalid("lenient evaluation needs the knowledge base"))?;
        let (relaxed, skipped) = judge_run_relaxed(rankings, qrels, cfg.relaxed_radius, kb)?;
        let relaxed: Vec<Judged> = relaxed.into_values().collect();
        for &m in metrics {
            report.push(ReportEntry::new(
                relaxed_name(m, cfg.relaxed_radius),
                cfg.k,
                m.variant_label(cfg),
                mean_of(&relaxed, m, cfg),
                relaxed.len(),
                skipped,
            ));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct SmpOutput {
    /// One ranking per MD-positive sentence, in corpus order.
    pub rankings: Vec<Ranking>,
    pub md: ClassificationReport,
    /// Pooled ED metrics over gold-positive sentences.
    pub ed: EvalReport,
    /// MD scores, spurious-query counts and per-language ED rows.
    pub diagnostics: EvalReport,
    pub spurious: usize,
}

/// MD then ED. Gold positives missed by MD are judged with empty rankings;
/// rankings of MD false positives are kept in the output but left out of
/// the metrics and counted as spurious.
pub fn run_smp(corpus: &Corpus, kb: &KnowledgeBase, engine: &EdEngine<'_>, cfg: &SmpConfig, md: Option<&Predictions>) -> Result<SmpOutput> {
    if engine.backend() != cfg.ed_backend {
        return Err(Error::invalid(format!("configured backend {:?} but engine is {:?}", cfg.ed_backend, engine.backend())));
    }
    let oracle;
    let predictions = match (cfg.md_source, md) {
        (MdSource::Oracle, _) => {
            oracle = Predictions::oracle(corpus);
            &oracle
        }
        (_, Some(p)) => p,
        (source, None) => return Err(Error::invalid(format!("MD source {source:?} needs predictions"))),
    };
    let md_report = evaluate_md(predictions, corpus)?;
    let rankings = retrieve_sentences(corpus, kb, engine, cfg, |d, s| predictions.get(&d.key(s.idx)).is_some_and(|p| p.label))?;

    let qrels = Qrels::from_corpus(corpus);
    let (judged_rankings, spurious): (Vec<Ranking>, Vec<Ranking>) = rankings.iter().cloned().partition(|r| qrels.contains(&r.query_id));
    let ed = evaluate_ed(&judged_rankings, &qrels, Some(kb), &cfg.metric, &cfg.metrics)?;

    let mut diagnostics = md_report.to_report();
    let queried = rankings.len();
    let rate = if queried == 0 { 0.0 } else { spurious.len() as f64 / queried as f64 };
    diagnostics.push(ReportEntry::new("spurious_queries", cfg.k(), "-", spurious.len() as f64, queried, 0));
    diagnostics.push(ReportEntry::new("spurious_rate", cfg.k(), "-", rate, queried, 0));
    diagnostics.extend(evaluate_sliced_ed(&judged_rankings, corpus, Some(kb), &cfg.metric, &cfg.metrics, &[SliceAxis::Language])?);

    Ok(SmpOutput { rankings, md: md_report, ed, diagnostics, spurious: spurious.len() })
}
