use std::collections::{BTreeSet, HashMap};

use super::Ranking;
use crate::error::{Error, Result};
use crate::features::DenseVector;

/// Exact cosine search over unit-normalized item vectors.
#[derive(Debug, Clone, Default)]
pub struct DenseIndex {
    dim: usize,
    item_ids: Vec<String>,
    vectors: Vec<DenseVector>,
    rows: HashMap<String, usize>,
}

impl DenseIndex {
    pub fn new(dim: usize) -> Self {
        Self { dim, ..Self::default() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.item_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.item_ids.is_empty()
    }

    pub fn contains(&self, item_id: &str) -> bool {
        self.rows.contains_key(item_id)
    }

    pub fn insert(&mut self, item_id: impl Into<String>, vector: &DenseVector) -> Result<()> {
        let item_id = item_id.into();
        if vector.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: vector.dim() });
        }
        if self.rows.contains_key(&item_id) {
            return Err(Error::Duplicate { kind: "indexed item", id: item_id });
        }
        self.rows.insert(item_id.clone(), self.item_ids.len());
        self.item_ids.push(item_id);
        self.vectors.push(vector.normalized());
        Ok(())
    }

    fn score(&self, row: usize, query: &DenseVector) -> f64 {
        let v = self.vectors[row].values();
        v.iter().zip(query.values()).map(|(a, b)| a * b).sum::<f64>().clamp(-1.0, 1.0)
    }

    /// Top `k` candidates by cosine similarity. Every candidate must be
    /// indexed; `None` searches all items.
    pub fn query(&self, query_id: &str, query: &DenseVector, candidates: Option<&BTreeSet<String>>, k: usize) -> Result<Ranking> {
        if k == 0 {
            return Err(Error::invalid("k must be >= 1"));
        }
        if query.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: query.dim() });
        }
        let q = query.normalized();
        let scored: Vec<(String, f64)> = match candidates {
            None => (0..self.len()).map(|row| (self.item_ids[row].clone(), self.score(row, &q))).collect(),
            Some(ids) => ids
                .iter()
                .map(|id| {
                    let row = *self.rows.get(id).ok_or_else(|| Error::Unknown { kind: "embedded item", id: id.clone() })?;
                    Ok((id.clone(), self.score(row, &q)))
                })
                .collect::<Result<_>>()?,
        };
        Ok(Ranking::from_scores(query_id, scored, k))
    }
}
