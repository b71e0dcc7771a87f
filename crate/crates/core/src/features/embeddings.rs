use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::DenseVector;
use crate::error::{Error, Result};

/// Externally produced vectors keyed by sentence or item id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    vectors: HashMap<String, DenseVector>,
}

impl EmbeddingStore {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&DenseVector> {
        self.vectors.get(id)
    }

    /// Entries sorted by id.
    pub fn iter(&self) -> impl Iterator<Item = (&String, &DenseVector)> + '_ {
        let mut entries: Vec<_> = self.vectors.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        entries.into_iter()
    }

    pub fn insert(&mut self, id: String, vector: DenseVector) -> Result<()> {
        if self.vectors.is_empty() && self.dim == 0 {
            self.dim = vector.dim();
        } else if vector.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: vector.dim() });
        }
        if self.vectors.insert(id.clone(), vector).is_some() {
            return Err(Error::Duplicate { kind: "embedding id", id });
        }
        Ok(())
    }
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingStore> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_embeddings(BufReader::new(file), &path.display().to_string())
}

/// Parses `id<TAB>v1 v2 ...` rows. The first row fixes the dimension.
pub fn parse_embeddings<R: BufRead>(reader: R, origin: &str) -> Result<EmbeddingStore> {
    let mut store = EmbeddingStore::default();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let (id, values) = line.split_once('\t').ok_or_else(|| Error::record(origin, lineno, "id", "expected `id<TAB>values`"))?;
        let values = values
            .split_whitespace()
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::record(origin, lineno, "values", e.to_string()))?;
        let vector = DenseVector::new(values).map_err(|e| Error::record(origin, lineno, "values", e.to_string()))?;
        store.insert(id.to_string(), vector).map_err(|e| Error::record(origin, lineno, "values", e.to_string()))?;
    }
    Ok(store)
}
