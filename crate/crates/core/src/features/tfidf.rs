use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::SparseVector;
use crate::error::{Error, Result};

/// TF-IDF vectorizer with smoothed idf, `ln((1 + N) / (1 + df)) + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    vocabulary: BTreeMap<String, u32>,
    idf: Vec<f64>,
    doc_count: usize,
}

pub fn fit_tfidf<S: AsRef<str>>(docs: &[Vec<S>]) -> Result<TfIdfModel> {
    if docs.is_empty() {
        return Err(Error::invalid("cannot fit TF-IDF on an empty corpus"));
    }
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        let unique: BTreeSet<&str> = doc.iter().map(AsRef::as_ref).collect();
        for term in unique {
            *df.entry(term).or_default() += 1;
        }
    }
    // sorted terms give a platform-independent column layout
    let mut terms: Vec<(&str, usize)> = df.into_iter().collect();
    terms.sort_unstable();
    let n = docs.len() as f64;
    let mut vocabulary = BTreeMap::new();
    let mut idf = Vec::with_capacity(terms.len());
    for (col, (term, df)) in terms.into_iter().enumerate() {
        vocabulary.insert(term.to_string(), col as u32);
        idf.push(((1.0 + n) / (1.0 + df as f64)).ln() + 1.0);
    }
    Ok(TfIdfModel { vocabulary, idf, doc_count: docs.len() })
}

impl TfIdfModel {
    pub fn vocabulary_size(&self) -> usize {
        self.idf.len()
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn column(&self, term: &str) -> Option<u32> {
        self.vocabulary.get(term).copied()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.column(term).map(|c| self.idf[c as usize])
    }

    /// Raw term counts times idf, L2-normalized. Out-of-vocabulary tokens are
    /// ignored; an all-OOV document maps to the zero vector.
    pub fn transform<S: AsRef<str>>(&self, doc: &[S]) -> SparseVector {
        let pairs = doc.iter().filter_map(|t| self.column(t.as_ref())).map(|c| (c, self.idf[c as usize])).collect();
        SparseVector::from_pairs(pairs).normalized()
    }
}
