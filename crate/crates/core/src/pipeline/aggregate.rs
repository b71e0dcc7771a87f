use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, SentenceKey};
use crate::error::{Error, Result};
use crate::retrieval::Ranking;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fusion {
    #[default]
    Max,
    Sum,
}

impl FromStr for Fusion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Fusion::Max),
            "sum" => Ok(Fusion::Sum),
            other => Err(Error::invalid(format!("unknown fusion `{other}`"))),
        }
    }
}

/// Items predicted for a whole document, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct DocAggregation {
    pub doc_id: String,
    pub ranked: Vec<(String, f64)>,
}

impl DocAggregation {
    pub fn item_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.ranked.iter().map(|(id, _)| id.as_str())
    }
}

/// Fuses the sentence rankings of `doc` per item, orders by score then
/// item id and keeps the first `cutoff` items.
pub fn aggregate_document(rankings: &[&Ranking], doc: &Document, cutoff: usize, fusion: Fusion) -> Result<DocAggregation> {
    if cutoff == 0 {
        return Err(Error::invalid("cutoff must be >= 1"));
    }
    let mut fused: BTreeMap<&str, f64> = BTreeMap::new();
    for r in rankings {
        let key = SentenceKey::parse(&r.query_id)?;
        if key.doc_id != doc.doc_id || doc.sentence(key.sent_idx).is_none() {
            return Err(Error::invalid(format!("ranking `{}` does not belong to document `{}`", r.query_id, doc.doc_id)));
        }
        for (item, score) in r.ranked() {
            fused
                .entry(item)
                .and_modify(|s| match fusion {
                    Fusion::Max => *s = s.max(*score),
                    Fusion::Sum => *s += score,
                })
                .or_insert(*score);
        }
    }
    let mut ranked: Vec<(String, f64)> = fused.into_iter().map(|(id, s)| (id.to_string(), s)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(cutoff);
    Ok(DocAggregation { doc_id: doc.doc_id.clone(), ranked })
}

/// Share of the document's unique gold items found in the aggregation;
/// `None` when the document has no resolvable gold.
pub fn document_recall(agg: &DocAggregation, doc: &Document) -> Option<f64> {
    let gold = doc.gold_items();
    if gold.is_empty() {
        return None;
    }
    let found: BTreeSet<&str> = agg.item_ids().filter(|id| gold.contains(*id)).collect();
    Some(found.len() as f64 / gold.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub cutoff: usize,
    pub recall: f64,
    pub n_docs: usize,
}

/// Mean document recall at cutoffs `1..=max_cutoff` over documents with
/// gold items. Rankings are grouped by the document part of their query id.
pub fn recall_curve(rankings: &[Ranking], corpus: &Corpus, max_cutoff: usize, fusion: Fusion) -> Result<Vec<CurvePoint>> {
    let mut by_doc: BTreeMap<String, Vec<&Ranking>> = BTreeMap::new();
    for r in rankings {
        let key = SentenceKey::parse(&r.query_id)?;
        if corpus.get(&key.doc_id).is_none() {
            return Err(Error::Unknown { kind: "document", id: key.doc_id });
        }
        by_doc.entry(key.doc_id).or_default().push(r);
    }
    let docs: Vec<&Document> = corpus.documents().iter().filter(|d| !d.gold_items().is_empty()).collect();
    // one full aggregation per document; shorter cutoffs are prefixes
    let full: Vec<(DocAggregation, &Document)> = docs
        .iter()
        .map(|d| {
            let rs = by_doc.get(&d.doc_id).map(Vec::as_slice).unwrap_or_default();
            Ok((aggregate_document(rs, d, usize::MAX, fusion)?, *d))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(max_cutoff);
    for cutoff in 1..=max_cutoff {
        let mut total = 0.0;
        for (agg, doc) in &full {
            let cut = DocAggregation { doc_id: agg.doc_id.clone(), ranked: agg.ranked.iter().take(cutoff).cloned().collect() };
            total += document_recall(&cut, doc).expect("documents were filtered to nonempty gold");
        }
        let n = full.len();
        out.push(CurvePoint { cutoff, recall: if n == 0 { 0.0 } else { total / n as f64 }, n_docs: n });
    }
    Ok(out)
}

/// Writes `cutoff<TAB>recall` rows with a header line.
pub fn write_curve<W: Write>(curve: &[CurvePoint], mut out: W) -> Result<()> {
    let mut emit = |line: String| writeln!(out, "{line}").map_err(|e| Error::io("<output>", e));
    emit("cutoff\trecall".into())?;
    for p in curve {
        emit(format!("{}\t{}", p.cutoff, p.recall))?;
    }
    Ok(())
}
