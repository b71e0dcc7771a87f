//! Mention detection: sentence-level binary classifiers, context expansion,
//! score fusion and evaluation.

mod eval;
mod knn;
mod logreg;
mod model;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, SentenceKey};
use crate::error::{Error, Result};

pub use eval::{evaluate_md, ClassificationReport, Confusion};
pub use knn::{KnnClassifier, KnnMetric, KnnVector, KnnWeighting, ReferenceSource};
pub use logreg::{predict_logreg, sigmoid, train_logreg, train_logreg_with_history, LogRegConfig, LogRegModel};
pub use model::{Detector, DetectorConfig, DetectorKind};

/// How much surrounding text a sentence is classified with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextMode {
    #[default]
    None,
    /// Append the targets of contextual-dependence relations.
    Relation,
    /// Surround with neighboring sentences.
    Neighbor,
}

impl ContextMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ContextMode::None => "none",
            ContextMode::Relation => "relation",
            ContextMode::Neighbor => "neighbor",
        }
    }
}

impl FromStr for ContextMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(ContextMode::None),
            "relation" => Ok(ContextMode::Relation),
            "neighbor" | "neighbour" => Ok(ContextMode::Neighbor),
            other => Err(Error::invalid(format!("unknown context mode `{other}`"))),
        }
    }
}

/// Sentence text with context; neighbor mode uses one sentence per side.
pub fn expand_context(doc: &Document, sent_idx: usize, mode: ContextMode) -> Result<String> {
    expand_context_window(doc, sent_idx, mode, 1)
}

/// Like [`expand_context`] with `window` neighbors on each side.
pub fn expand_context_window(doc: &Document, sent_idx: usize, mode: ContextMode, window: usize) -> Result<String> {
    let sentence = doc.sentence(sent_idx).ok_or_else(|| Error::Unknown { kind: "sentence", id: doc.key(sent_idx).to_string() })?;
    let parts: Vec<&str> = match mode {
        ContextMode::None => return Ok(sentence.text.clone()),
        ContextMode::Relation => std::iter::once(sentence.text.as_str())
            .chain(sentence.context_targets().into_iter().filter_map(|t| doc.sentence(t)).map(|s| s.text.as_str()))
            .collect(),
        ContextMode::Neighbor => {
            let lo = sent_idx.saturating_sub(window);
            let hi = (sent_idx + window).min(doc.sentences.len() - 1);
            doc.sentences[lo..=hi].iter().map(|s| s.text.as_str()).collect()
        }
    };
    Ok(parts.join(" "))
}

/// `weight * a + (1 - weight) * b`, all inputs in `[0, 1]`.
pub fn fuse_scores(a: f64, b: f64, weight: f64) -> Result<f64> {
    for (name, v) in [("score", a), ("score", b), ("weight", weight)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid(format!("{name} {v} outside [0, 1]")));
        }
    }
    Ok(weight * a + (1.0 - weight) * b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdPrediction {
    pub label: bool,
    pub score: f64,
}

/// Per-sentence MD output, ordered by sentence key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Predictions {
    map: BTreeMap<SentenceKey, MdPrediction>,
}

impl Predictions {
    pub fn insert(&mut self, key: SentenceKey, prediction: MdPrediction) -> Result<()> {
        if self.map.contains_key(&key) {
            return Err(Error::Duplicate { kind: "prediction", id: key.to_string() });
        }
        self.map.insert(key, prediction);
        Ok(())
    }

    pub fn get(&self, key: &SentenceKey) -> Option<&MdPrediction> {
        self.map.get(key)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SentenceKey, &MdPrediction)> + '_ {
        self.map.iter()
    }

    /// Gold labels as predictions with score 1 or 0.
    pub fn oracle(corpus: &Corpus) -> Self {
        Self::from_fn(corpus, |_, s| s.label)
    }

    pub fn from_fn(corpus: &Corpus, mut label: impl FnMut(&Document, &crate::corpus::Sentence) -> bool) -> Self {
        let map = corpus
            .sentences()
            .map(|(d, s)| {
                let l = label(d, s);
                (d.key(s.idx), MdPrediction { label: l, score: if l { 1.0 } else { 0.0 } })
            })
            .collect();
        Self { map }
    }

    /// Fuses scores key by key; both sides must cover the same sentences.
    pub fn fuse(&self, other: &Predictions, weight: f64, threshold: f64) -> Result<Predictions> {
        let missing: Vec<String> = self
            .map
            .keys()
            .filter(|k| !other.map.contains_key(*k))
            .chain(other.map.keys().filter(|k| !self.map.contains_key(*k)))
            .map(ToString::to_string)
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingPredictions(missing));
        }
        let mut map = BTreeMap::new();
        for (key, a) in &self.map {
            let score = fuse_scores(a.score, other.map[key].score, weight)?;
            map.insert(key.clone(), MdPrediction { label: score >= threshold, score });
        }
        Ok(Predictions { map })
    }
}

impl FromIterator<(SentenceKey, MdPrediction)> for Predictions {
    fn from_iter<I: IntoIterator<Item = (SentenceKey, MdPrediction)>>(iter: I) -> Self {
        Self { map: iter.into_iter().collect() }
    }
}

/// Writes `doc_id<TAB>sent_idx<TAB>label<TAB>score` rows.
pub fn write_predictions<W: Write>(predictions: &Predictions, mut out: W) -> Result<()> {
    for (key, p) in predictions.iter() {
        writeln!(out, "{}\t{}\t{}\t{}", key.doc_id, key.sent_idx, u8::from(p.label), p.score).map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<Predictions> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(BufReader::new(file), &path.display().to_string())
}

pub fn parse_predictions<R: BufRead>(reader: R, origin: &str) -> Result<Predictions> {
    let mut out = Predictions::default();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::record(origin, lineno, "<row>", format!("expected 4 columns, found {}", cols.len())));
        }
        let sent_idx: usize = cols[1].parse().map_err(|_| Error::record(origin, lineno, "sent_idx", format!("not an integer: `{}`", cols[1])))?;
        let label = match cols[2] {
            "1" => true,
            "0" => false,
            other => return Err(Error::record(origin, lineno, "label", format!("expected 0 or 1, found `{other}`"))),
        };
        let score: f64 = cols[3]
            .parse()
            .ok()
            .filter(|s: &f64| (0.0..=1.0).contains(s))
            .ok_or_else(|| Error::record(origin, lineno, "score", format!("not a number in [0, 1]: `{}`", cols[3])))?;
        out.insert(SentenceKey::new(cols[0], sent_idx), MdPrediction { label, score })
            .map_err(|e| Error::record(origin, lineno, "sent_idx", e.to_string()))?;
    }
    Ok(out)
}
