use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{cosine, sparse_cosine, DenseVector, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KnnMetric {
    /// `1 - cos(a, b)`; a zero vector has cosine 0 with everything.
    #[default]
    Cosine,
    Euclidean,
    Manhattan,
}

impl FromStr for KnnMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cosine" => Ok(KnnMetric::Cosine),
            "euclidean" => Ok(KnnMetric::Euclidean),
            "manhattan" => Ok(KnnMetric::Manhattan),
            other => Err(Error::invalid(format!("unknown distance metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KnnWeighting {
    #[default]
    Uniform,
    /// Inverse distance. Neighbors at distance 0, if any, take all the weight.
    Distance,
}

impl FromStr for KnnWeighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(KnnWeighting::Uniform),
            "distance" => Ok(KnnWeighting::Distance),
            other => Err(Error::invalid(format!("unknown weighting `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceSource {
    TrainingSet,
    /// KB items as positives, training negatives as negatives.
    Kb,
}

pub trait KnnVector {
    fn distance(&self, other: &Self, metric: KnnMetric) -> Result<f64>;
}

impl KnnVector for SparseVector {
    fn distance(&self, other: &Self, metric: KnnMetric) -> Result<f64> {
        Ok(match metric {
            KnnMetric::Cosine => 1.0 - sparse_cosine(self, other),
            KnnMetric::Euclidean => {
                let mut acc = 0.0;
                self.zip_union(other, |a, b| acc += (a - b) * (a - b));
                acc.sqrt()
            }
            KnnMetric::Manhattan => {
                let mut acc = 0.0;
                self.zip_union(other, |a, b| acc += (a - b).abs());
                acc
            }
        })
    }
}

impl KnnVector for DenseVector {
    fn distance(&self, other: &Self, metric: KnnMetric) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let pairs = self.values().iter().zip(other.values());
        Ok(match metric {
            KnnMetric::Cosine => 1.0 - cosine(self, other)?,
            KnnMetric::Euclidean => pairs.map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            KnnMetric::Manhattan => pairs.map(|(a, b)| (a - b).abs()).sum(),
        })
    }
}

/// Brute-force k-nearest-neighbor classifier over labeled references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnClassifier<V> {
    references: Vec<(V, bool)>,
    k: usize,
    metric: KnnMetric,
    weighting: KnnWeighting,
    source: ReferenceSource,
}

impl<V: KnnVector> KnnClassifier<V> {
    pub fn new(references: Vec<(V, bool)>, k: usize, metric: KnnMetric, weighting: KnnWeighting) -> Result<Self> {
        Self::with_source(references, k, metric, weighting, ReferenceSource::TrainingSet)
    }

    /// References are every KB vector (positive) plus the negative training
    /// examples; positive training examples are not used.
    pub fn from_kb(kb_vectors: Vec<V>, training: Vec<(V, bool)>, k: usize, metric: KnnMetric, weighting: KnnWeighting) -> Result<Self> {
        let references = kb_vectors.into_iter().map(|v| (v, true)).chain(training.into_iter().filter(|(_, y)| !y)).collect();
        Self::with_source(references, k, metric, weighting, ReferenceSource::Kb)
    }

    fn with_source(references: Vec<(V, bool)>, k: usize, metric: KnnMetric, weighting: KnnWeighting, source: ReferenceSource) -> Result<Self> {
        if references.is_empty() {
            return Err(Error::invalid("k-NN needs at least one reference vector"));
        }
        if k == 0 || k > references.len() {
            return Err(Error::invalid(format!("k = {k} outside 1..={}", references.len())));
        }
        Ok(Self { references, k, metric, weighting, source })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.references.len()
    }

    pub fn is_empty(&self) -> bool {
        self.references.is_empty()
    }

    pub fn source(&self) -> ReferenceSource {
        self.source
    }

    /// Weighted share of positive labels among the `k` nearest references
    /// (equal distances keep reference order). Label is positive when the
    /// share is at least one half.
    pub fn predict(&self, query: &V) -> Result<(bool, f64)> {
        let mut dists: Vec<(f64, usize)> =
            self.references.iter().enumerate().map(|(i, (v, _))| Ok((query.distance(v, self.metric)?.max(0.0), i))).collect::<Result<_>>()?;
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let nearest = &dists[..self.k];
        let exact = nearest.iter().any(|(d, _)| *d == 0.0);
        let weight = |d: f64| match self.weighting {
            KnnWeighting::Uniform => 1.0,
            KnnWeighting::Distance if exact => f64::from(u8::from(d == 0.0)),
            KnnWeighting::Distance => 1.0 / d,
        };
        let (mut pos, mut total) = (0.0, 0.0);
        for &(d, i) in nearest {
            let w = weight(d);
            total += w;
            if self.references[i].1 {
                pos += w;
            }
        }
        let score = (pos / total).clamp(0.0, 1.0);
        Ok((score >= 0.5, score))
    }
}
