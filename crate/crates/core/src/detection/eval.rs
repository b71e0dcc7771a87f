use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Predictions;
use crate::corpus::{Corpus, Language};
use crate::error::{Error, Result};
use crate::metrics::{EvalReport, ReportEntry};

/// Binary confusion counts with the positive class as reference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

impl Confusion {
    pub fn add(&mut self, predicted: bool, gold: bool) {
        match (predicted, gold) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Zero when nothing was predicted positive.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        harmonic(self.precision(), self.recall())
    }

    /// F1 of the negative class.
    pub fn negative_f1(&self) -> f64 {
        harmonic(ratio(self.tn, self.tn + self.fn_), ratio(self.tn, self.tn + self.fp))
    }

    /// Unweighted mean of the positive- and negative-class F1.
    pub fn macro_f1(&self) -> f64 {
        (self.f1() + self.negative_f1()) / 2.0
    }
}

impl std::ops::AddAssign for Confusion {
    fn add_assign(&mut self, o: Confusion) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
        self.tn += o.tn;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub pooled: Confusion,
    pub per_language: BTreeMap<Language, Confusion>,
}

impl ClassificationReport {
    /// Mean of the per-language positive-class F1 values.
    pub fn mean_language_f1(&self) -> f64 {
        if self.per_language.is_empty() {
            return 0.0;
        }
        self.per_language.values().map(Confusion::f1).sum::<f64>() / self.per_language.len() as f64
    }

    /// Rows `md_precision`, `md_recall`, `md_f1`, `md_macro_f1`, pooled and
    /// per `language=`, plus `md_f1_language_mean`.
    pub fn to_report(&self) -> EvalReport {
        let mut out = EvalReport::default();
        let rows = |c: &Confusion| [("md_precision", c.precision()), ("md_recall", c.recall()), ("md_f1", c.f1()), ("md_macro_f1", c.macro_f1())];
        for (name, v) in rows(&self.pooled) {
            out.push(ReportEntry::new(name, 0, "-", v, self.pooled.total(), 0));
        }
        out.push(ReportEntry::new("md_f1_language_mean", 0, "-", self.mean_language_f1(), self.pooled.total(), 0));
        for (lang, c) in &self.per_language {
            for (name, v) in rows(c) {
                out.push(ReportEntry::new(name, 0, "-", v, c.total(), 0).with_slice(format!("language={lang}")));
            }
        }
        out
    }
}

/// Positive-class scores against the gold labels of `gold`. Every gold
/// sentence needs a prediction; extra predictions are ignored.
pub fn evaluate_md(predictions: &Predictions, gold: &Corpus) -> Result<ClassificationReport> {
    let mut report = ClassificationReport::default();
    let mut missing = Vec::new();
    for (doc, s) in gold.sentences() {
        let key = doc.key(s.idx);
        match predictions.get(&key) {
            Some(p) => {
                report.pooled.add(p.label, s.label);
                report.per_language.entry(doc.language).or_default().add(p.label, s.label);
            }
            None => missing.push(key.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingPredictions(missing));
    }
    Ok(report)
}
