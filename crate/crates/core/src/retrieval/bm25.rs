use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::Ranking;
use crate::error::{Error, Result};
use crate::features::Tokenizer;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.k1 > 0.0 && self.k1.is_finite()) {
            return Err(Error::invalid(format!("k1 must be > 0, got {}", self.k1)));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(Error::invalid(format!("b must be within [0, 1], got {}", self.b)));
        }
        Ok(())
    }
}

/// Inverted index over verbalized items.
///
/// Documents are addressed by their position in the sorted id list, so every
/// posting list is ordered by item id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bm25Index {
    item_ids: Vec<String>,
    doc_lengths: Vec<u32>,
    avg_doc_length: f64,
    postings: BTreeMap<String, Vec<(u32, u32)>>,
    params: Bm25Params,
    tokenizer: Tokenizer,
}

pub fn build_bm25(items: &BTreeMap<String, String>, tokenizer: Tokenizer, params: Bm25Params) -> Result<Bm25Index> {
    params.validate()?;
    if items.is_empty() {
        return Err(Error::invalid("cannot index an empty item collection"));
    }
    let mut item_ids = Vec::with_capacity(items.len());
    let mut doc_lengths = Vec::with_capacity(items.len());
    let mut postings: BTreeMap<String, Vec<(u32, u32)>> = BTreeMap::new();
    for (doc, (id, text)) in items.iter().enumerate() {
        let tokens = tokenizer.tokenize(text);
        let mut tf: BTreeMap<String, u32> = BTreeMap::new();
        for t in &tokens {
            *tf.entry(t.clone()).or_default() += 1;
        }
        for (term, count) in tf {
            postings.entry(term).or_default().push((doc as u32, count));
        }
        item_ids.push(id.clone());
        doc_lengths.push(tokens.len() as u32);
    }
    let avg_doc_length = doc_lengths.iter().map(|&l| f64::from(l)).sum::<f64>() / doc_lengths.len() as f64;
    Ok(Bm25Index { item_ids, doc_lengths, avg_doc_length, postings, params, tokenizer })
}

impl Bm25Index {
    pub fn doc_count(&self) -> usize {
        self.item_ids.len()
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avg_doc_length
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    pub fn vocabulary_size(&self) -> usize {
        self.postings.len()
    }

    pub fn doc_length(&self, item_id: &str) -> Option<u32> {
        self.ordinal(item_id).map(|d| self.doc_lengths[d as usize])
    }

    pub fn document_frequency(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    /// `ln(1 + (N - df + 0.5) / (df + 0.5))`, never negative.
    pub fn idf(&self, term: &str) -> f64 {
        let n = self.doc_count() as f64;
        let df = self.document_frequency(term) as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    fn ordinal(&self, item_id: &str) -> Option<u32> {
        self.item_ids.binary_search_by(|probe| probe.as_str().cmp(item_id)).ok().map(|d| d as u32)
    }

    fn term_weight(&self, tf: u32, doc: u32) -> f64 {
        let Bm25Params { k1, b } = self.params;
        let tf = f64::from(tf);
        let ratio = if self.avg_doc_length > 0.0 { f64::from(self.doc_lengths[doc as usize]) / self.avg_doc_length } else { 0.0 };
        tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * ratio))
    }

    /// Scores candidate items against `query` and returns the best `k` with
    /// positive score. `None` scores the whole index.
    pub fn query(&self, query_id: &str, query: &str, candidates: Option<&std::collections::BTreeSet<String>>, k: usize) -> Result<Ranking> {
        if k == 0 {
            return Err(Error::invalid("k must be >= 1"));
        }
        let allowed: Option<HashSet<u32>> = candidates.map(|c| c.iter().filter_map(|id| self.ordinal(id)).collect());
        if allowed.as_ref().is_some_and(HashSet::is_empty) {
            return Ok(Ranking::empty(query_id));
        }
        let mut scores: HashMap<u32, f64> = HashMap::new();
        for term in self.tokenizer.tokenize(query) {
            let Some(list) = self.postings.get(&term) else {
                continue;
            };
            let idf = self.idf(&term);
            for &(doc, tf) in list {
                if allowed.as_ref().is_some_and(|a| !a.contains(&doc)) {
                    continue;
                }
                *scores.entry(doc).or_default() += idf * self.term_weight(tf, doc);
            }
        }
        let scored = scores.into_iter().filter(|&(_, s)| s > 0.0).map(|(doc, s)| (self.item_ids[doc as usize].clone(), s)).collect();
        Ok(Ranking::from_scores(query_id, scored, k))
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn toy() -> Bm25Index {
        let items = BTreeMap::from([("d1".to_string(), "a b".to_string()), ("d2".to_string(), "a c".to_string())]);
        build_bm25(&items, Tokenizer::default(), Bm25Params::default()).unwrap()
    }

    #[test]
    fn counts_on_toy_fixture() {
        let idx = toy();
        assert_eq!(idx.document_frequency("a"), 2);
        assert_eq!(idx.document_frequency("b"), 1);
        assert_eq!(idx.avg_doc_length(), 2.0);
        assert_eq!(idx.doc_length("d2"), Some(2));
    }

    #[test]
    fn toy_query_scores_ln2() {
        let idx = toy();
        let r = idx.query("q", "b", None, 10).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.ranked()[0].0, "d1");
        assert!((r.ranked()[0].1 - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn filtering_and_empty_cases() {
        let idx = toy();
        let only_d2 = BTreeSet::from(["d2".to_string()]);
        assert!(idx.query("q", "b", Some(&only_d2), 10).unwrap().is_empty());
        assert!(idx.query("q", "zzz", None, 10).unwrap().is_empty());
        assert!(idx.query("q", "a", Some(&BTreeSet::new()), 10).unwrap().is_empty());
        assert!(idx.query("q", "a", None, 0).is_err());
        // idf of a term in every document stays positive
        assert!(idx.idf("a") > 0.0);
    }

    #[test]
    fn single_doc_and_determinism() {
        let items = BTreeMap::from([("x".to_string(), "one two three".to_string())]);
        let a = build_bm25(&items, Tokenizer::default(), Bm25Params::default()).unwrap();
        assert_eq!(a.avg_doc_length(), 3.0);
        let b = build_bm25(&items, Tokenizer::default(), Bm25Params::default()).unwrap();
        assert_eq!(a, b);
        assert!(build_bm25(&BTreeMap::new(), Tokenizer::default(), Bm25Params::default()).is_err());
        assert!(build_bm25(&items, Tokenizer::default(), Bm25Params { k1: 0.0, b: 0.5 }).is_err());
    }
}
