//! Entity disambiguation: rank knowledge-base items against a sentence.
//!
//! Two backends share the [`Ranking`] output type: a BM25 inverted index over
//! verbalized items and exact cosine search over dense vectors. Both accept
//! an optional candidate set (citation filtering) and break score ties by
//! ascending item id.

mod bm25;
mod dense;
mod trec;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::{expand_group_neighbors, KnowledgeBase};

pub use bm25::{build_bm25, Bm25Index, Bm25Params};
pub use dense::DenseIndex;
pub use trec::{load_run, parse_run, write_run};

/// Ranked items for one query, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub query_id: String,
    ranked: Vec<(String, f64)>,
}

/// Best-first order: higher score, then smaller item id.
pub(crate) fn rank_order(a: &(String, f64), b: &(String, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

impl Ranking {
    /// Wraps an already ordered list, checking that scores do not increase
    /// and ids are distinct.
    pub fn new(query_id: impl Into<String>, ranked: Vec<(String, f64)>) -> Result<Self> {
        let query_id = query_id.into();
        let mut seen = BTreeSet::new();
        for (pos, (id, score)) in ranked.iter().enumerate() {
            if !score.is_finite() {
                return Err(Error::invalid(format!("query `{query_id}`: non-finite score for `{id}`")));
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::Duplicate { kind: "ranked item", id: format!("{query_id}/{id}") });
            }
            if pos > 0 && *score > ranked[pos - 1].1 {
                return Err(Error::invalid(format!("query `{query_id}`: scores increase at rank {}", pos + 1)));
            }
        }
        Ok(Self { query_id, ranked })
    }

    pub fn empty(query_id: impl Into<String>) -> Self {
        Self { query_id: query_id.into(), ranked: Vec::new() }
    }

    /// Sorts unordered `(item, score)` pairs best first and keeps the top `k`.
    pub fn from_scores(query_id: impl Into<String>, mut scores: Vec<(String, f64)>, k: usize) -> Self {
        if k < scores.len() {
            scores.select_nth_unstable_by(k, rank_order);
            scores.truncate(k);
        }
        scores.sort_unstable_by(rank_order);
        Self { query_id: query_id.into(), ranked: scores }
    }

    pub fn ranked(&self) -> &[(String, f64)] {
        &self.ranked
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn item_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.ranked.iter().map(|(id, _)| id.as_str())
    }

    pub fn truncated(&self, k: usize) -> Ranking {
        Ranking { query_id: self.query_id.clone(), ranked: self.ranked.iter().take(k).cloned().collect() }
    }
}

/// Gold items widened by their question-group neighbors.
pub fn relax_gold(gold: &BTreeSet<String>, radius: u64, kb: &KnowledgeBase) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for id in gold {
        out.extend(expand_group_neighbors(id, radius, kb)?);
    }
    Ok(out)
}

/// Per-rank hit flags for lenient evaluation: a retrieved item counts as a
/// hit when it is a not-yet-credited gold item or a group neighbor (within
/// `radius`) of one. Exact gold hits are credited first; among several
/// neighbors the smallest gold id is credited. Each gold item is credited at
/// most once, so recall keeps `|gold|` as its denominator.
pub fn relaxed_hits(ranking: &Ranking, gold: &BTreeSet<String>, radius: u64, kb: &KnowledgeBase) -> Result<Vec<bool>> {
    let mut neighborhoods: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for g in gold {
        neighborhoods.insert(g, expand_group_neighbors(g, radius, kb)?);
    }
    let mut credited: BTreeSet<&str> = BTreeSet::new();
    let mut hits = Vec::with_capacity(ranking.len());
    for id in ranking.item_ids() {
        let target = match gold.get(id) {
            Some(g) if !credited.contains(g.as_str()) => Some(g.as_str()),
            _ => neighborhoods.iter().find(|(g, hood)| !credited.contains(**g) && hood.contains(id)).map(|(g, _)| *g),
        };
        if let Some(g) = target {
            credited.insert(g);
        }
        hits.push(target.is_some());
    }
    Ok(hits)
}
