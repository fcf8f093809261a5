use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FeatureVector, ScoredPair};
use crate::error::{Error, Result};

pub const MODEL_HEADER: &str = "logistic v1";

/// Scores are kept this far from 0 and 1.
const SCORE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_lambda: f64,
    pub seed: u64,
    /// Minibatch size; `None` means full-batch.
    pub batch_size: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 2000,
            l2_lambda: 1e-3,
            seed: 0,
            batch_size: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.l2_lambda.is_finite() && self.l2_lambda >= 0.0) {
            return Err(Error::Config(format!(
                "l2_lambda must be non-negative, got {}",
                self.l2_lambda
            )));
        }
        if self.batch_size == Some(0) {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// One training example: features and binary target.
pub type Sample = ([f64; 4], bool);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: [f64; 4],
    pub bias: f64,
    pub hyperparams: TrainConfig,
    /// Regularized training loss after the last epoch.
    pub final_loss: Option<f64>,
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
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn dot(w: &[f64; 4], x: &[f64; 4]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Mean log-loss plus `(lambda / 2) * |w|^2`; the bias is not regularized.
pub fn log_loss(weights: &[f64; 4], bias: f64, data: &[Sample], lambda: f64) -> f64 {
    let n = data.len().max(1) as f64;
    let data_loss: f64 = data
        .iter()
        .map(|(x, y)| {
            let z = dot(weights, x) + bias;
            softplus(z) - if *y { z } else { 0.0 }
        })
        .sum::<f64>()
        / n;
    data_loss + 0.5 * lambda * dot(weights, weights)
}

/// Gradient of [`log_loss`] with respect to the weights and the bias.
pub fn gradient(weights: &[f64; 4], bias: f64, data: &[Sample], lambda: f64) -> ([f64; 4], f64) {
    let n = data.len().max(1) as f64;
    let mut gw = [0.0; 4];
    let mut gb = 0.0;
    for (x, y) in data {
        let r = sigmoid(dot(weights, x) + bias) - if *y { 1.0 } else { 0.0 };
        for (g, xi) in gw.iter_mut().zip(x) {
            *g += r * xi;
        }
        gb += r;
    }
    for (g, w) in gw.iter_mut().zip(weights) {
        *g = *g / n + lambda * w;
    }
    (gw, gb / n)
}

/// Gradient descent from zero. Full-batch unless `batch_size` is set, in which
/// case each epoch visits a seeded shuffle of the data in minibatches.
pub fn train_samples(data: &[Sample], config: &TrainConfig) -> Result<LogisticModel> {
    fit(data, config, false).map(|(model, _)| model)
}

/// Like [`train_samples`], also returning the loss after every epoch.
pub fn train_with_history(data: &[Sample], config: &TrainConfig) -> Result<(LogisticModel, Vec<f64>)> {
    fit(data, config, true)
}

fn fit(data: &[Sample], config: &TrainConfig, record: bool) -> Result<(LogisticModel, Vec<f64>)> {
    config.validate()?;
    if let Some((x, _)) = data.iter().find(|(x, _)| x.iter().any(|v| !v.is_finite())) {
        return Err(Error::Validation(format!("non-finite feature in {x:?}")));
    }
    let positives = data.iter().filter(|(_, y)| *y).count();
    if positives == 0 || positives == data.len() {
        return Err(Error::Training(format!(
            "need both classes, got {positives} positive of {}",
            data.len()
        )));
    }

    let mut w = [0.0; 4];
    let mut b = 0.0;
    let mut history = Vec::new();
    let lr = config.learning_rate;
    let step = |w: &mut [f64; 4], b: &mut f64, batch: &[Sample]| {
        let (gw, gb) = gradient(w, *b, batch, config.l2_lambda);
        for (wi, g) in w.iter_mut().zip(gw) {
            *wi -= lr * g;
        }
        *b -= lr * gb;
    };

    let minibatch = config.batch_size.filter(|&s| s < data.len());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<Sample> = data.to_vec();
    for _ in 0..config.epochs {
        match minibatch {
            None => step(&mut w, &mut b, data),
            Some(size) => {
                order.shuffle(&mut rng);
                for batch in order.chunks(size) {
                    step(&mut w, &mut b, batch);
                }
            }
        }
        if record {
            history.push(log_loss(&w, b, data, config.l2_lambda));
        }
    }

    if w.iter().chain([&b]).any(|v| !v.is_finite()) {
        return Err(Error::Training("training diverged; lower the learning rate".into()));
    }
    let model = LogisticModel {
        weights: w,
        bias: b,
        hyperparams: *config,
        final_loss: Some(log_loss(&w, b, data, config.l2_lambda)),
    };
    Ok((model, history))
}

/// Train on the pairs that carry a binary label; unlabeled pairs are skipped.
pub fn train(pairs: &[ScoredPair], config: &TrainConfig) -> Result<LogisticModel> {
    let data: Vec<Sample> = pairs
        .iter()
        .filter_map(|p| p.binary_label.map(|y| (p.features.values(), y)))
        .collect();
    train_samples(&data, config)
}

impl LogisticModel {
    /// `w . x + b`.
    pub fn margin(&self, features: &FeatureVector) -> f64 {
        dot(&self.weights, &features.values()) + self.bias
    }

    /// Relevance probability, strictly inside (0, 1).
    pub fn score(&self, features: &FeatureVector) -> f64 {
        sigmoid(self.margin(features)).clamp(SCORE_EPS, 1.0 - SCORE_EPS)
    }

    /// Set `score` on every pair.
    pub fn score_all(&self, pairs: &mut [ScoredPair]) {
        for p in pairs {
            p.score = Some(self.score(&p.features));
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{MODEL_HEADER}\n");
        for v in self.weights.iter().chain([&self.bias]) {
            let _ = writeln!(s, "{v:?}");
        }
        let h = &self.hyperparams;
        let _ = writeln!(s, "learning_rate {:?}", h.learning_rate);
        let _ = writeln!(s, "epochs {}", h.epochs);
        let _ = writeln!(s, "l2_lambda {:?}", h.l2_lambda);
        let _ = writeln!(s, "seed {}", h.seed);
        if let Some(bs) = h.batch_size {
            let _ = writeln!(s, "batch_size {bs}");
        }
        if let Some(loss) = self.final_loss {
            let _ = writeln!(s, "final_loss {loss:?}");
        }
        s
    }

    pub fn from_text(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == MODEL_HEADER => {}
            Some((_, l)) => return Err(format!("expected header {MODEL_HEADER:?}, found {:?}", l.trim())),
            None => return Err("empty model file".into()),
        }
        let mut numbers = [0.0; 5];
        for slot in numbers.iter_mut() {
            let (i, l) = lines.next().ok_or("model file ends before all coefficients")?;
            *slot = l.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or(format!(
                "line {}: invalid coefficient {:?}",
                i + 1,
                l.trim()
            ))?;
        }
        let mut hyperparams = TrainConfig::default();
        let mut final_loss = None;
        for (i, l) in lines {
            let (key, value) = l
                .trim()
                .split_once(' ')
                .ok_or(format!("line {}: expected `key value`", i + 1))?;
            let bad = || format!("line {}: invalid value for {key}", i + 1);
            match key {
                "learning_rate" => hyperparams.learning_rate = value.parse().map_err(|_| bad())?,
                "epochs" => hyperparams.epochs = value.parse().map_err(|_| bad())?,
                "l2_lambda" => hyperparams.l2_lambda = value.parse().map_err(|_| bad())?,
                "seed" => hyperparams.seed = value.parse().map_err(|_| bad())?,
                "batch_size" => hyperparams.batch_size = Some(value.parse().map_err(|_| bad())?),
                "final_loss" => final_loss = Some(value.parse().map_err(|_| bad())?),
                _ => return Err(format!("line {}: unknown key {key:?}", i + 1)),
            }
        }
        Ok(LogisticModel {
            weights: [numbers[0], numbers[1], numbers[2], numbers[3]],
            bias: numbers[4],
            hyperparams,
            final_loss,
        })
    }
}

pub fn write_model(path: impl AsRef<Path>, model: &LogisticModel) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model.to_text()).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: impl AsRef<Path>) -> Result<LogisticModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    LogisticModel::from_text(&text).map_err(|m| Error::parse(path, 0, m))
}
