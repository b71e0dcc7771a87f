use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::relaxed_name;
use crate::corpus::{Corpus, Sentence};
use crate::detection::{Confusion, Predictions};
use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::metrics::{mean_of, EvalReport, Judged, Metric, MetricConfig, ReportEntry};
use crate::retrieval::{relaxed_hits, Ranking};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceAxis {
    Language,
    Type,
    Subtype,
    /// `single` (one mention) or `multi` (two or more).
    ItemCount,
}

impl SliceAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SliceAxis::Language => "language",
            SliceAxis::Type => "type",
            SliceAxis::Subtype => "subtype",
            SliceAxis::ItemCount => "item_count",
        }
    }
}

impl FromStr for SliceAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "language" | "lang" => Ok(SliceAxis::Language),
            "type" => Ok(SliceAxis::Type),
            "subtype" => Ok(SliceAxis::Subtype),
            "item_count" | "itemcount" => Ok(SliceAxis::ItemCount),
            other => Err(Error::invalid(format!("unknown slice axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SliceKey {
    pub axis: SliceAxis,
    pub value: String,
}

impl fmt::Display for SliceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.axis.as_str(), self.value)
    }
}

/// Slice value of a positive sentence on a sentence-level axis. A sentence
/// whose mentions span several categories is `mixed`.
fn sentence_value(axis: SliceAxis, language: &str, s: &Sentence) -> String {
    let single_or_mixed = |values: BTreeSet<&'static str>| match values.len() {
        1 => values.into_iter().next().unwrap_or_default().to_string(),
        _ => "mixed".to_string(),
    };
    match axis {
        SliceAxis::Language => language.to_string(),
        SliceAxis::Type => single_or_mixed(s.mentions.iter().map(|m| m.mention_type.as_str()).collect()),
        SliceAxis::Subtype => single_or_mixed(s.mentions.iter().map(|m| m.subtype.as_str()).collect()),
        SliceAxis::ItemCount => if s.mentions.len() == 1 { "single" } else { "multi" }.to_string(),
    }
}

/// MD rows per slice. The language axis gets precision, recall and F1 over
/// all sentences; the other axes partition the gold-positive sentences and
/// report `md_recall` on each part.
pub fn evaluate_sliced_md(predictions: &Predictions, corpus: &Corpus, axes: &[SliceAxis]) -> Result<EvalReport> {
    let mut missing = Vec::new();
    let mut report = EvalReport::default();
    for &axis in axes {
        let mut parts: BTreeMap<String, Confusion> = BTreeMap::new();
        for (doc, s) in corpus.sentences() {
            let key = doc.key(s.idx);
            let Some(p) = predictions.get(&key) else {
                missing.push(key.to_string());
                continue;
            };
            if axis != SliceAxis::Language && !s.label {
                continue;
            }
            parts.entry(sentence_value(axis, doc.language.as_str(), s)).or_default().add(p.label, s.label);
        }
        if !missing.is_empty() {
            missing.sort();
            missing.dedup();
            return Err(Error::MissingPredictions(missing));
        }
        for (value, c) in parts {
            let slice = SliceKey { axis, value }.to_string();
            let rows: &[(&str, f64)] = if axis == SliceAxis::Language {
                &[("md_precision", c.precision()), ("md_recall", c.recall()), ("md_f1", c.f1())]
            } else {
                &[("md_recall", c.recall())]
            };
            for (name, v) in rows {
                report.push(ReportEntry::new(*name, 0, "-", *v, c.total(), 0).with_slice(slice.clone()));
            }
        }
    }
    Ok(report)
}

struct Unit<'a> {
    relevant: BTreeSet<String>,
    value: String,
    ranking: Option<&'a Ranking>,
}

/// ED rows per slice. Language and item-count slices partition the
/// gold-positive sentences; type and subtype slices are over mentions, each
/// resolvable mention judged as a query whose only relevant item is the
/// mentioned one. Rankings of sentences without gold are ignored.
pub fn evaluate_sliced_ed(
    rankings: &[Ranking],
    corpus: &Corpus,
    kb: Option<&KnowledgeBase>,
    cfg: &MetricConfig,
    metrics: &[Metric],
    axes: &[SliceAxis],
) -> Result<EvalReport> {
    let by_query: BTreeMap<&str, &Ranking> = rankings.iter().map(|r| (r.query_id.as_str(), r)).collect();
    let mut report = EvalReport::default();
    for &axis in axes {
        let mut units = Vec::new();
        for (doc, s) in corpus.sentences().filter(|(_, s)| s.label) {
            let ranking = by_query.get(doc.key(s.idx).to_string().as_str()).copied();
            match axis {
                SliceAxis::Language | SliceAxis::ItemCount => {
                    units.push(Unit { value: sentence_value(axis, doc.language.as_str(), s), relevant: s.gold_items(), ranking })
                }
                SliceAxis::Type | SliceAxis::Subtype => {
                    for m in s.mentions.iter().filter(|m| !m.is_unk()) {
                        units.push(Unit {
                            relevant: BTreeSet::from([m.item_id.clone()]),
                            value: if axis == SliceAxis::Type { m.mention_type.as_str() } else { m.subtype.as_str() }.to_string(),
                            ranking,
                        });
                    }
                }
            }
        }
        let mut groups: BTreeMap<String, Vec<Unit>> = BTreeMap::new();
        for u in units {
            groups.entry(u.value.clone()).or_default().push(u);
        }
        for (value, units) in groups {
            let slice = SliceKey { axis, value }.to_string();
            let skipped = units.iter().filter(|u| u.relevant.is_empty()).count();
            let judged: Vec<&Unit> = units.iter().filter(|u| !u.relevant.is_empty()).collect();
            let strict = judged
                .iter()
                .map(|u| match u.ranking {
                    Some(r) => Judged::strict(r, &u.relevant),
                    None => Judged::new(Vec::new(), u.relevant.len()),
                })
                .collect::<Result<Vec<_>>>()?;
            for &m in metrics {
                report.push(
                    ReportEntry::new(m.as_str(), cfg.k, m.variant_label(cfg), mean_of(&strict, m, cfg), strict.len(), skipped)
                        .with_slice(slice.clone()),
                );
            }
            if cfg.relaxed_radius > 0 {
                let kb = kb.ok_or_else(|| Error::invalid("lenient evaluation needs the knowledge base"))?;
                let relaxed = judged
                    .iter()
                    .map(|u| {
                        let hits = match u.ranking {
                            Some(r) => relaxed_hits(r, &u.relevant, cfg.relaxed_radius, kb)?,
                            None => Vec::new(),
                        };
                        Judged::new(hits, u.relevant.len())
                    })
                    .collect::<Result<Vec<_>>>()?;
                for &m in metrics {
                    report.push(
                        ReportEntry::new(
                            relaxed_name(m, cfg.relaxed_radius),
                            cfg.k,
                            m.variant_label(cfg),
                            mean_of(&relaxed, m, cfg),
                            relaxed.len(),
                            skipped,
                        )
                        .with_slice(slice.clone()),
                    );
                }
            }
        }
    }
    Ok(report)
}
