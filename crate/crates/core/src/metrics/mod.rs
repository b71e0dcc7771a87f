//! Ranking metrics with binary relevance: Recall@K, Precision@K, AP@K and
//! MAP@K (two variants), DCG@K and nDCG@K.
//!
//! Every metric is computed from a [`Judged`] list, the per-rank hit flags
//! of a ranking plus the number of relevant items. Strict judgments come
//! from set membership; lenient ones may be built by other means (see
//! [`crate::retrieval::relaxed_hits`]) and are scored by the same code.

mod qrels;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::retrieval::Ranking;

pub use qrels::{load_qrels, parse_qrels, write_qrels, Qrels};
pub use report::{render_report, EvalReport, ReportEntry, ReportFormat};

/// How AP@K normalizes the summed precisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApVariant {
    /// Sum of P@i over relevant ranks `i <= K`, divided by `min(|relevant|, K)`.
    #[default]
    StandardTruncated,
    /// Mean of P@i over every cutoff `i = 1..=K`.
    Literal,
}

impl ApVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            ApVariant::StandardTruncated => "standard_truncated",
            ApVariant::Literal => "literal",
        }
    }
}

impl FromStr for ApVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "standard_truncated" | "standard" => Ok(ApVariant::StandardTruncated),
            "literal" => Ok(ApVariant::Literal),
            other => Err(Error::invalid(format!("unknown AP variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub k: usize,
    pub ap_variant: ApVariant,
    pub relaxed_radius: u64,
}

impl MetricConfig {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k must be >= 1"));
        }
        Ok(Self { k, ap_variant: ApVariant::default(), relaxed_radius: 0 })
    }

    pub fn with_variant(mut self, variant: ApVariant) -> Self {
        self.ap_variant = variant;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Recall,
    Precision,
    #[serde(rename = "map")]
    AveragePrecision,
    Ndcg,
}

impl Metric {
    pub const REPORTED: [Metric; 3] = [Metric::Recall, Metric::AveragePrecision, Metric::Ndcg];

    /// Report name; the mean of AP over queries is reported as `map`.
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Recall => "recall",
            Metric::Precision => "precision",
            Metric::AveragePrecision => "map",
            Metric::Ndcg => "ndcg",
        }
    }

    pub fn variant_label(self, cfg: &MetricConfig) -> &'static str {
        match self {
            Metric::AveragePrecision => cfg.ap_variant.as_str(),
            _ => "-",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "recall" | "r" => Ok(Metric::Recall),
            "precision" | "p" => Ok(Metric::Precision),
            "map" | "ap" => Ok(Metric::AveragePrecision),
            "ndcg" => Ok(Metric::Ndcg),
            other => Err(Error::invalid(format!("unknown metric `{other}`"))),
        }
    }
}

/// Per-rank relevance of one ranked list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judged {
    hits: Vec<bool>,
    relevant: usize,
}

impl Judged {
    /// `relevant` must be positive and at least the number of hits.
    pub fn new(hits: Vec<bool>, relevant: usize) -> Result<Self> {
        if relevant == 0 {
            return Err(Error::EmptyGold("<judged>".into()));
        }
        let found = hits.iter().filter(|&&h| h).count();
        if found > relevant {
            return Err(Error::invalid(format!("{found} hits exceed {relevant} relevant items")));
        }
        Ok(Self { hits, relevant })
    }

    pub fn strict(ranking: &Ranking, relevant: &BTreeSet<String>) -> Result<Self> {
        if relevant.is_empty() {
            return Err(Error::EmptyGold(ranking.query_id.clone()));
        }
        let hits = ranking.item_ids().map(|id| relevant.contains(id)).collect();
        Ok(Self { hits, relevant: relevant.len() })
    }

    pub fn hits(&self) -> &[bool] {
        &self.hits
    }

    pub fn relevant(&self) -> usize {
        self.relevant
    }

    fn hits_in_top(&self, k: usize) -> usize {
        self.hits.iter().take(k).filter(|&&h| h).count()
    }

    pub fn recall(&self, k: usize) -> f64 {
        self.hits_in_top(k) as f64 / self.relevant as f64
    }

    /// Hits in the top `k` over `k`; missing ranks count as misses.
    pub fn precision(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.hits_in_top(k) as f64 / k as f64
    }

    pub fn average_precision(&self, k: usize, variant: ApVariant) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let mut found = 0usize;
        let mut sum = 0.0;
        for i in 1..=k {
            let hit = self.hits.get(i - 1).copied().unwrap_or(false);
            if hit {
                found += 1;
            }
            let precision = found as f64 / i as f64;
            match variant {
                ApVariant::StandardTruncated if hit => sum += precision,
                ApVariant::StandardTruncated => {}
                ApVariant::Literal => sum += precision,
            }
        }
        match variant {
            ApVariant::StandardTruncated => sum / self.relevant.min(k) as f64,
            ApVariant::Literal => sum / k as f64,
        }
    }

    pub fn dcg(&self, k: usize) -> f64 {
        self.hits.iter().take(k).enumerate().filter(|(_, &h)| h).map(|(i, _)| 1.0 / ((i + 2) as f64).log2()).sum()
    }

    /// DCG of a ranking with `min(|relevant|, k)` leading hits.
    pub fn ideal_dcg(&self, k: usize) -> f64 {
        (0..self.relevant.min(k)).map(|i| 1.0 / ((i + 2) as f64).log2()).sum()
    }

    pub fn ndcg(&self, k: usize) -> f64 {
        let ideal = self.ideal_dcg(k);
        if ideal == 0.0 {
            return 0.0;
        }
        self.dcg(k) / ideal
    }

    pub fn value(&self, metric: Metric, cfg: &MetricConfig) -> f64 {
        match metric {
            Metric::Recall => self.recall(cfg.k),
            Metric::Precision => self.precision(cfg.k),
            Metric::AveragePrecision => self.average_precision(cfg.k, cfg.ap_variant),
            Metric::Ndcg => self.ndcg(cfg.k),
        }
    }
}

pub fn recall_at_k(ranking: &Ranking, relevant: &BTreeSet<String>, k: usize) -> Result<f64> {
    Ok(Judged::strict(ranking, relevant)?.recall(k))
}

pub fn precision_at_k(ranking: &Ranking, relevant: &BTreeSet<String>, k: usize) -> Result<f64> {
    Ok(Judged::strict(ranking, relevant)?.precision(k))
}

pub fn average_precision_at_k(ranking: &Ranking, relevant: &BTreeSet<String>, cfg: &MetricConfig) -> Result<f64> {
    Ok(Judged::strict(ranking, relevant)?.average_precision(cfg.k, cfg.ap_variant))
}

pub fn ndcg_at_k(ranking: &Ranking, relevant: &BTreeSet<String>, k: usize) -> Result<f64> {
    Ok(Judged::strict(ranking, relevant)?.ndcg(k))
}

/// Mean of a metric over evaluated queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue {
    pub value: f64,
    pub n_queries: usize,
    pub skipped: usize,
}

/// Averages `metric` over judged queries; an empty list yields 0.
pub fn mean_of(judged: &[Judged], metric: Metric, cfg: &MetricConfig) -> f64 {
    if judged.is_empty() {
        return 0.0;
    }
    judged.iter().map(|j| j.value(metric, cfg)).sum::<f64>() / judged.len() as f64
}

/// Strict judgments for every qrels query. Queries without a ranking are
/// judged as empty rankings; queries with empty gold are skipped and
/// counted; a ranking whose query is absent from the qrels is an error.
pub fn judge_run(rankings: &[Ranking], qrels: &Qrels) -> Result<(BTreeMap<String, Judged>, usize)> {
    let mut by_query: BTreeMap<&str, &Ranking> = BTreeMap::new();
    for r in rankings {
        if !qrels.contains(&r.query_id) {
            return Err(Error::Unknown { kind: "qrels query", id: r.query_id.clone() });
        }
        if by_query.insert(&r.query_id, r).is_some() {
            return Err(Error::Duplicate { kind: "run query", id: r.query_id.clone() });
        }
    }
    let mut judged = BTreeMap::new();
    let mut skipped = 0;
    for (query, relevant) in qrels.iter() {
        if relevant.is_empty() {
            log::warn!("query `{query}` has no resolvable gold items; skipped");
            skipped += 1;
            continue;
        }
        let ranking = by_query.get(query.as_str()).map(|r| (*r).clone()).unwrap_or_else(|| Ranking::empty(query.clone()));
        judged.insert(query.clone(), Judged::strict(&ranking, relevant)?);
    }
    Ok((judged, skipped))
}

pub fn evaluate_run(metric: Metric, rankings: &[Ranking], qrels: &Qrels, cfg: &MetricConfig) -> Result<MetricValue> {
    let (judged, skipped) = judge_run(rankings, qrels)?;
    let judged: Vec<Judged> = judged.into_values().collect();
    Ok(MetricValue { value: mean_of(&judged, metric, cfg), n_queries: judged.len(), skipped })
}

/// MAP@K: unweighted mean of AP@K over evaluated queries.
pub fn mean_average_precision(rankings: &[Ranking], qrels: &Qrels, cfg: &MetricConfig) -> Result<f64> {
    Ok(evaluate_run(Metric::AveragePrecision, rankings, qrels, cfg)?.value)
}
