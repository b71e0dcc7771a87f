use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    expand_context_window, predict_logreg, train_logreg, ContextMode, KnnClassifier, KnnMetric, KnnWeighting, LogRegConfig, LogRegModel,
    MdPrediction, Predictions,
};
use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::features::{fit_tfidf, SparseVector, TfIdfModel, Tokenizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    LogReg,
    Knn,
}

impl std::str::FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "logreg" | "lr" => Ok(DetectorKind::LogReg),
            "knn" => Ok(DetectorKind::Knn),
            other => Err(Error::invalid(format!("unknown detector `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub kind: DetectorKind,
    pub tokenizer: Tokenizer,
    pub context: ContextMode,
    pub window: usize,
    pub logreg: LogRegConfig,
    pub knn_k: usize,
    pub knn_metric: KnnMetric,
    pub knn_weighting: KnnWeighting,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            kind: DetectorKind::LogReg,
            tokenizer: Tokenizer::default(),
            context: ContextMode::None,
            window: 1,
            logreg: LogRegConfig::default(),
            knn_k: 5,
            knn_metric: KnnMetric::Cosine,
            knn_weighting: KnnWeighting::Uniform,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Classifier {
    LogReg(LogRegModel),
    Knn(KnnClassifier<SparseVector>),
}

/// TF-IDF features over context-expanded sentences feeding either a
/// logistic regression or a k-NN classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detector {
    config: DetectorConfig,
    tfidf: TfIdfModel,
    classifier: Classifier,
}

impl Detector {
    /// Trains on every sentence of `train`. With `kb_texts` a k-NN detector
    /// uses the KB texts as its positive references (see
    /// [`KnnClassifier::from_kb`]); the TF-IDF vocabulary then covers them too.
    pub fn train(train: &Corpus, kb_texts: Option<&[String]>, config: DetectorConfig) -> Result<Self> {
        let mut texts = Vec::with_capacity(train.sentence_count());
        let mut labels = Vec::with_capacity(train.sentence_count());
        for (doc, s) in train.sentences() {
            texts.push(expand_context_window(doc, s.idx, config.context, config.window)?);
            labels.push(s.label);
        }
        let tokens: Vec<Vec<String>> = texts.iter().map(|t| config.tokenizer.tokenize(t)).collect();
        let kb_tokens: Vec<Vec<String>> = kb_texts.unwrap_or_default().iter().map(|t| config.tokenizer.tokenize(t)).collect();
        let all: Vec<Vec<String>> = tokens.iter().chain(&kb_tokens).cloned().collect();
        let tfidf = fit_tfidf(&all)?;
        let features: Vec<SparseVector> = tokens.iter().map(|t| tfidf.transform(t)).collect();
        let classifier = match config.kind {
            DetectorKind::LogReg => Classifier::LogReg(train_logreg(&features, &labels, tfidf.vocabulary_size(), &config.logreg)?),
            DetectorKind::Knn => {
                let training: Vec<(SparseVector, bool)> = features.into_iter().zip(labels).collect();
                let knn = match kb_texts {
                    Some(_) => {
                        let kb_vectors = kb_tokens.iter().map(|t| tfidf.transform(t)).collect();
                        KnnClassifier::from_kb(kb_vectors, training, config.knn_k, config.knn_metric, config.knn_weighting)?
                    }
                    None => KnnClassifier::new(training, config.knn_k, config.knn_metric, config.knn_weighting)?,
                };
                Classifier::Knn(knn)
            }
        };
        Ok(Self { config, tfidf, classifier })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn predict_text(&self, text: &str) -> Result<MdPrediction> {
        let x = self.tfidf.transform(&self.config.tokenizer.tokenize(text));
        let (label, score) = match &self.classifier {
            Classifier::LogReg(m) => predict_logreg(m, &x),
            Classifier::Knn(k) => k.predict(&x)?,
        };
        Ok(MdPrediction { label, score })
    }

    pub fn predict_sentence(&self, doc: &Document, sent_idx: usize) -> Result<MdPrediction> {
        self.predict_text(&expand_context_window(doc, sent_idx, self.config.context, self.config.window)?)
    }

    /// Predictions for every sentence; documents are scored in parallel.
    pub fn predict(&self, corpus: &Corpus) -> Result<Predictions> {
        let per_doc: Vec<Vec<_>> = corpus
            .documents()
            .par_iter()
            .map(|doc| doc.sentences.iter().map(|s| Ok((doc.key(s.idx), self.predict_sentence(doc, s.idx)?))).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(per_doc.into_iter().flatten().collect())
    }
}
