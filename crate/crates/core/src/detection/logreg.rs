use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub threshold: f64,
    /// Recorded with the model. Training starts from zero weights and uses
    /// the full batch, so no random numbers are drawn.
    pub seed: u64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self { epochs: 200, learning_rate: 1.0, l2: 1e-4, threshold: 0.5, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub threshold: f64,
}

impl LogRegModel {
    pub fn zeros(dim: usize, threshold: f64) -> Self {
        Self { weights: vec![0.0; dim], bias: 0.0, threshold }
    }

    pub fn score(&self, x: &SparseVector) -> f64 {
        sigmoid(x.dot_dense(&self.weights) + self.bias)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Label is positive iff the score reaches the threshold.
pub fn predict_logreg(model: &LogRegModel, x: &SparseVector) -> (bool, f64) {
    let s = model.score(x);
    (s >= model.threshold, s)
}

struct Problem<'a> {
    xs: &'a [SparseVector],
    ys: &'a [bool],
    l2: f64,
}

impl Problem<'_> {
    /// Mean log loss plus `l2 / 2 * |w|^2`; the bias is not penalized.
    fn objective(&self, w: &[f64], b: f64) -> f64 {
        let n = self.xs.len() as f64;
        let data: f64 = self
            .xs
            .iter()
            .zip(self.ys)
            .map(|(x, &y)| {
                let z = x.dot_dense(w) + b;
                if y {
                    softplus(-z)
                } else {
                    softplus(z)
                }
            })
            .sum();
        data / n + 0.5 * self.l2 * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let n = self.xs.len() as f64;
        let mut gw: Vec<f64> = w.iter().map(|v| self.l2 * v).collect();
        let mut gb = 0.0;
        for (x, &y) in self.xs.iter().zip(self.ys) {
            let r = (sigmoid(x.dot_dense(w) + b) - f64::from(u8::from(y))) / n;
            for &(col, v) in x.entries() {
                gw[col as usize] += r * v;
            }
            gb += r;
        }
        (gw, gb)
    }
}

pub fn train_logreg(features: &[SparseVector], labels: &[bool], dim: usize, cfg: &LogRegConfig) -> Result<LogRegModel> {
    Ok(train_logreg_with_history(features, labels, dim, cfg)?.0)
}

/// Full-batch gradient descent from zero weights. Each step halves the
/// learning rate until the objective does not increase, so the returned
/// per-epoch objective values (initial value first) never go up.
pub fn train_logreg_with_history(features: &[SparseVector], labels: &[bool], dim: usize, cfg: &LogRegConfig) -> Result<(LogRegModel, Vec<f64>)> {
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch { left: features.len(), right: labels.len() });
    }
    if !labels.iter().any(|&y| y) || labels.iter().all(|&y| y) {
        return Err(Error::invalid("logistic regression needs examples of both classes"));
    }
    if !(cfg.threshold > 0.0 && cfg.threshold < 1.0) {
        return Err(Error::invalid(format!("threshold {} outside (0, 1)", cfg.threshold)));
    }
    if cfg.learning_rate.is_nan() || cfg.learning_rate <= 0.0 || cfg.l2.is_nan() || cfg.l2 < 0.0 {
        return Err(Error::invalid("learning rate must be > 0 and l2 >= 0"));
    }
    if let Some(col) = features.iter().flat_map(|x| x.entries()).map(|e| e.0 as usize).find(|&c| c >= dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: col + 1 });
    }
    let problem = Problem { xs: features, ys: labels, l2: cfg.l2 };
    let mut model = LogRegModel::zeros(dim, cfg.threshold);
    let mut loss = problem.objective(&model.weights, model.bias);
    let mut history = vec![loss];
    for _ in 0..cfg.epochs {
        let (gw, gb) = problem.gradient(&model.weights, model.bias);
        let mut step = cfg.learning_rate;
        let mut accepted = None;
        for _ in 0..40 {
            let w: Vec<f64> = model.weights.iter().zip(&gw).map(|(w, g)| w - step * g).collect();
            let b = model.bias - step * gb;
            let l = problem.objective(&w, b);
            if l <= loss {
                accepted = Some((w, b, l));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((w, b, l)) => {
                model.weights = w;
                model.bias = b;
                loss = l;
            }
            None => {
                log::debug!("no descent step found; stopping early");
                history.push(loss);
                break;
            }
        }
        history.push(loss);
    }
    Ok((model, history))
}
