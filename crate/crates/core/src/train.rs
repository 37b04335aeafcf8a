//! Full-batch training loop and evaluation.

use std::time::Instant;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureScaler, FiniteCheck, SplitMasks};
use crate::error::{Error, Result};
use crate::graph::Label;
use crate::metrics::{auc, f1_macro};
use crate::model::{forward, objective_and_grad, ModelConfig, ModelContext, SecGfdParams, TrainTargets};
use crate::nn::{Adam, AdamConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub seed: u64,
    /// Stop once validation AUC has not improved for this many epochs and keep
    /// the best parameters. `None` trains for exactly `epochs`.
    pub patience: Option<usize>,
    /// z-score features with statistics from the training split.
    pub standardize: bool,
    /// Record wall-clock time in reports; off keeps artifacts reproducible.
    pub record_timing: bool,
    pub threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            learning_rate: 0.001,
            weight_decay: 0.0,
            seed: 0,
            patience: None,
            standardize: true,
            record_timing: false,
            threshold: 0.5,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be at least 1"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(Error::invalid("weight_decay must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::invalid("threshold outside [0, 1]"));
        }
        if self.patience == Some(0) {
            return Err(Error::invalid("patience must be at least 1"));
        }
        Ok(())
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            weight_decay: self.weight_decay,
            ..AdamConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub hybrid_loss: f64,
    pub env_loss: Option<f64>,
    pub val_auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub dataset: String,
    pub seed: u64,
    /// Which split the metrics were computed on.
    pub split: String,
    pub num_evaluated: usize,
    pub f1_macro: f64,
    pub auc: f64,
    pub threshold: f64,
    pub history: Vec<EpochRecord>,
    pub model_config: ModelConfig,
    pub train_config: TrainConfig,
    pub wall_time_ms: u64,
}

impl FiniteCheck for MetricsReport {
    fn first_non_finite(&self) -> Option<String> {
        let scalars = [
            ("f1_macro", self.f1_macro),
            ("auc", self.auc),
            ("threshold", self.threshold),
            ("model_config.alpha", self.model_config.alpha),
            ("model_config.epsilon", self.model_config.epsilon),
            ("train_config.learning_rate", self.train_config.learning_rate),
            ("train_config.weight_decay", self.train_config.weight_decay),
        ];
        if let Some((name, _)) = scalars.iter().find(|(_, v)| !v.is_finite()) {
            return Some((*name).to_string());
        }
        self.history.iter().find_map(|r| {
            let values = [Some(r.loss), Some(r.hybrid_loss), r.env_loss, r.val_auc];
            values
                .iter()
                .flatten()
                .any(|v| !v.is_finite())
                .then(|| format!("history[epoch {}]", r.epoch))
        })
    }
}

/// Everything needed to score nodes later.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub model_config: ModelConfig,
    pub scaler: Option<FeatureScaler>,
    pub params: SecGfdParams,
}

impl FiniteCheck for TrainedModel {
    fn first_non_finite(&self) -> Option<String> {
        if !self.params.is_finite() {
            return Some("params".into());
        }
        let scaler_ok = self
            .scaler
            .as_ref()
            .is_none_or(|s| s.mean.iter().chain(&s.std).all(|v| v.is_finite()));
        (!scaler_ok).then(|| "scaler".into())
    }
}

impl TrainedModel {
    fn prepared_features(&self, dataset: &Dataset) -> Result<Array2<f64>> {
        match &self.scaler {
            Some(s) => s.transform(&dataset.features),
            None => Ok(dataset.features.clone()),
        }
    }

    /// Anomaly probability of every node.
    pub fn predict(&self, dataset: &Dataset) -> Result<Vec<f64>> {
        let features = self.prepared_features(dataset)?;
        if features.ncols() != self.params.tensors[SecGfdParams::W1].value.nrows() {
            return Err(Error::Schema(format!(
                "model expects {} features, dataset has {}",
                self.params.tensors[SecGfdParams::W1].value.nrows(),
                features.ncols()
            )));
        }
        // Scoring never touches the environment branch.
        let cfg = ModelConfig {
            use_env: false,
            ..self.model_config.clone()
        };
        let ctx = ModelContext::new(&dataset.graph, &features, &cfg)?;
        Ok(forward(&self.params, &ctx, &features, &cfg)?.probs)
    }
}

/// Labeled nodes of `mask` as (probabilities, anomaly flags).
fn masked_scores(probs: &[f64], dataset: &Dataset, mask: &[bool]) -> (Vec<f64>, Vec<bool>) {
    let mut scores = Vec::new();
    let mut truth = Vec::new();
    for (v, &m) in mask.iter().enumerate() {
        let label = dataset.labels.get(v);
        if m && label.is_known() {
            scores.push(probs[v]);
            truth.push(label == Label::Anomaly);
        }
    }
    (scores, truth)
}

fn has_both_classes(dataset: &Dataset, mask: &[bool]) -> bool {
    let (mut normal, mut anomaly) = (false, false);
    for (v, &m) in mask.iter().enumerate() {
        if m {
            match dataset.labels.get(v) {
                Label::Normal => normal = true,
                Label::Anomaly => anomaly = true,
                Label::Unknown => {}
            }
        }
    }
    normal && anomaly
}

/// F1-macro at `threshold` and AUC of the given probabilities on `mask`.
pub fn score_probs(probs: &[f64], dataset: &Dataset, mask: &[bool], threshold: f64) -> Result<(f64, f64, usize)> {
    if probs.len() != dataset.num_nodes() || mask.len() != dataset.num_nodes() {
        return Err(Error::invalid("probabilities, mask and dataset sizes differ"));
    }
    let (scores, truth) = masked_scores(probs, dataset, mask);
    let pred: Vec<bool> = scores.iter().map(|&p| p >= threshold).collect();
    let area = auc(&scores, &truth)?;
    Ok((f1_macro(&pred, &truth), area, scores.len()))
}

/// Scores a trained model on the labeled nodes of `mask`.
pub fn evaluate(
    model: &TrainedModel,
    dataset: &Dataset,
    mask: &[bool],
    threshold: f64,
) -> Result<MetricsReport> {
    let probs = model.predict(dataset)?;
    let (f1, area, count) = score_probs(&probs, dataset, mask, threshold)?;
    Ok(MetricsReport {
        dataset: dataset.name.clone(),
        seed: 0,
        split: "mask".into(),
        num_evaluated: count,
        f1_macro: f1,
        auc: area,
        threshold,
        history: Vec::new(),
        model_config: model.model_config.clone(),
        train_config: TrainConfig {
            threshold,
            ..TrainConfig::default()
        },
        wall_time_ms: 0,
    })
}

/// Trains on the labeled nodes of `splits.train` and reports metrics on the
/// test split (or the training split when the test split lacks a class).
pub fn train(
    dataset: &Dataset,
    splits: &SplitMasks,
    model_cfg: &ModelConfig,
    train_cfg: &TrainConfig,
) -> Result<(TrainedModel, MetricsReport)> {
    let started = Instant::now();
    model_cfg.validate()?;
    train_cfg.validate()?;
    let n = dataset.num_nodes();
    if [&splits.train, &splits.val, &splits.test].iter().any(|m| m.len() != n) {
        return Err(Error::invalid("split masks do not match the node count"));
    }
    let targets = TrainTargets::new(&dataset.labels, &splits.train, model_cfg.delta_mode)?;

    let scaler = if train_cfg.standardize {
        Some(FeatureScaler::fit(&dataset.features, &splits.train)?)
    } else {
        None
    };
    let features = match &scaler {
        Some(s) => s.transform(&dataset.features)?,
        None => dataset.features.clone(),
    };
    let ctx = ModelContext::new(&dataset.graph, &features, model_cfg)?;
    let mut params = SecGfdParams::init(features.ncols(), model_cfg, train_cfg.seed)?;
    let mut adam = Adam::new(train_cfg.adam(), &params.tensors);

    let watch_val = train_cfg.patience.is_some() && has_both_classes(dataset, &splits.val);
    let mut best: Option<(f64, SecGfdParams)> = None;
    let mut since_best = 0;
    let mut history = Vec::with_capacity(train_cfg.epochs);

    for epoch in 1..=train_cfg.epochs {
        let losses = objective_and_grad(&mut params, &ctx, &features, &targets, model_cfg)?;
        if !losses.total.is_finite() {
            return Err(Error::Diverged {
                epoch,
                loss: losses.total,
            });
        }
        adam.step(&mut params.tensors)?;
        if !params.is_finite() {
            return Err(Error::Diverged {
                epoch,
                loss: losses.total,
            });
        }
        let val_auc = if watch_val {
            let probs = forward(&params, &ctx, &features, model_cfg)?.probs;
            Some(score_probs(&probs, dataset, &splits.val, train_cfg.threshold)?.1)
        } else {
            None
        };
        history.push(EpochRecord {
            epoch,
            loss: losses.total,
            hybrid_loss: losses.hybrid,
            env_loss: losses.env,
            val_auc,
        });
        if let (Some(v), Some(patience)) = (val_auc, train_cfg.patience) {
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, params.clone()));
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= patience {
                    break;
                }
            }
        }
    }
    if let Some((_, p)) = best {
        params = p;
    }

    let model = TrainedModel {
        model_config: model_cfg.clone(),
        scaler,
        params,
    };
    let probs = forward(&model.params, &ctx, &features, model_cfg)?.probs;
    let (split, mask) = if has_both_classes(dataset, &splits.test) {
        ("test", &splits.test)
    } else {
        ("train", &splits.train)
    };
    let (f1, area, count) = score_probs(&probs, dataset, mask, train_cfg.threshold)?;
    let wall_time_ms = if train_cfg.record_timing {
        started.elapsed().as_millis() as u64
    } else {
        0
    };
    let report = MetricsReport {
        dataset: dataset.name.clone(),
        seed: train_cfg.seed,
        split: split.into(),
        num_evaluated: count,
        f1_macro: f1,
        auc: area,
        threshold: train_cfg.threshold,
        history,
        model_config: model_cfg.clone(),
        train_config: train_cfg.clone(),
        wall_time_ms,
    };
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, make_split, SyntheticConfig};

    fn small() -> (Dataset, SplitMasks) {
        let d = generate_synthetic(&SyntheticConfig {
            num_nodes: 200,
            anomaly_rate: 0.1,
            mean_degree: 6.0,
            seed: 2,
            ..Default::default()
        })
        .unwrap();
        let s = make_split(&d.labels, (0.4, 0.2, 0.4), 2, true).unwrap();
        (d, s)
    }

    fn quick() -> (ModelConfig, TrainConfig) {
        (
            ModelConfig {
                hidden_dim: 8,
                ..Default::default()
            },
            TrainConfig {
                epochs: 20,
                ..Default::default()
            },
        )
    }

    #[test]
    fn no_train_anomalies_rejected() {
        let (d, mut s) = small();
        for v in 0..d.num_nodes() {
            if d.labels.get(v) == Label::Anomaly {
                s.train[v] = false;
            }
        }
        let (m, t) = quick();
        assert!(matches!(train(&d, &s, &m, &t), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn same_seed_same_report() {
        let (d, s) = small();
        let (m, t) = quick();
        let (a_model, a) = train(&d, &s, &m, &t).unwrap();
        let (b_model, b) = train(&d, &s, &m, &t).unwrap();
        assert_eq!(a, b);
        assert_eq!(a_model, b_model);
        assert_eq!(a.split, "test");
    }

    #[test]
    fn evaluate_matches_training_report_and_is_repeatable() {
        let (d, s) = small();
        let (m, t) = quick();
        let (model, report) = train(&d, &s, &m, &t).unwrap();
        let e1 = evaluate(&model, &d, &s.test, 0.5).unwrap();
        let e2 = evaluate(&model, &d, &s.test, 0.5).unwrap();
        assert_eq!(e1, e2);
        assert_eq!(e1.auc, report.auc);
        assert_eq!(e1.f1_macro, report.f1_macro);
    }

    #[test]
    fn early_stopping_truncates_history() {
        let (d, s) = small();
        let (m, mut t) = quick();
        t.epochs = 200;
        t.patience = Some(3);
        t.learning_rate = 0.2;
        let (_, report) = train(&d, &s, &m, &t).unwrap();
        assert!(report.history.iter().all(|r| r.val_auc.is_some()));
        assert!(report.history.len() <= 200);
    }

    #[test]
    fn exploding_rate_diverges_or_stays_finite() {
        let (d, s) = small();
        let (m, mut t) = quick();
        t.learning_rate = 1e300;
        match train(&d, &s, &m, &t) {
            Err(Error::Diverged { epoch, .. }) => assert!(epoch >= 1),
            Ok((model, r)) => {
                assert!(model.params.is_finite());
                assert!(r.first_non_finite().is_none());
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn nan_report_rejected() {
        let (d, s) = small();
        let (m, t) = quick();
        let (_, mut report) = train(&d, &s, &m, &t).unwrap();
        report.auc = f64::NAN;
        assert!(matches!(crate::data::to_json(&report), Err(Error::InvalidValue(_))));
    }
}
