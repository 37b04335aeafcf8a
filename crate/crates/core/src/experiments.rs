//! Experiment harnesses: heterophily-edge clipping, order sweep and ablations.
//!
//! Every cell is keyed by (variant, ratio, order, seed). A cell's seed drives
//! its split, its parameter initialization and, for clipping, its edge draw.
//! Cells run in parallel and are collected in a fixed order, so tables are a
//! pure function of their inputs.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{make_split, Dataset, SplitMasks};
use crate::error::{Error, Result};
use crate::graph::{LabelVector, SparseGraph};
use crate::model::{FilterVariant, ModelConfig};
use crate::train::{train, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClipMode {
    /// Candidates are all edges whose endpoints carry different labels.
    FullGraph,
    /// Only heterophilic edges with both endpoints in the training split.
    TrainGraph,
}

/// Removes `floor(ratio · |candidates|)` heterophilic edges drawn uniformly
/// with a seeded shuffle.
pub fn clip_edges(
    g: &SparseGraph,
    labels: &LabelVector,
    mode: ClipMode,
    ratio: f64,
    seed: u64,
    train_mask: Option<&[bool]>,
) -> Result<SparseGraph> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::invalid(format!("clip ratio {ratio} outside [0, 1]")));
    }
    if labels.len() != g.num_nodes() {
        return Err(Error::invalid("label count does not match the graph"));
    }
    let in_train: Box<dyn Fn(usize) -> bool> = match (mode, train_mask) {
        (ClipMode::FullGraph, _) => Box::new(|_| true),
        (ClipMode::TrainGraph, Some(mask)) if mask.len() == g.num_nodes() => Box::new(move |v| mask[v]),
        (ClipMode::TrainGraph, _) => {
            return Err(Error::invalid("TrainGraph clipping needs a train mask per node"))
        }
    };
    let mut candidates: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(u, v)| {
            let (a, b) = (labels.get(u), labels.get(v));
            a.is_known() && b.is_known() && a != b && in_train(u) && in_train(v)
        })
        .collect();
    let remove = (ratio * candidates.len() as f64).floor() as usize;
    if remove == 0 {
        return Ok(g.clone());
    }
    candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut removed = candidates[..remove].to_vec();
    removed.sort_unstable();
    Ok(g.filter_edges(|u, v| {
        let key = if u < v { (u, v) } else { (v, u) };
        removed.binary_search(&key).is_err()
    }))
}

/// Single-filter message passing used by the clipping study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClipVariant {
    LowPass,
    HighPass,
    BandPass,
}

impl ClipVariant {
    pub const ALL: [ClipVariant; 3] = [ClipVariant::LowPass, ClipVariant::HighPass, ClipVariant::BandPass];

    pub fn name(self) -> &'static str {
        match self {
            ClipVariant::LowPass => "low-pass",
            ClipVariant::HighPass => "high-pass",
            ClipVariant::BandPass => "band-pass",
        }
    }

    /// The base configuration rewired to this variant, environment term off.
    pub fn model_config(self, base: &ModelConfig) -> ModelConfig {
        let mut cfg = ModelConfig {
            use_env: false,
            ..base.clone()
        };
        match self {
            ClipVariant::LowPass => cfg.filter = FilterVariant::LowPass,
            ClipVariant::HighPass => cfg.filter = FilterVariant::HighPass,
            ClipVariant::BandPass => {
                cfg.filter = FilterVariant::Hybrid;
                cfg.order = 2;
                cfg.use_band = true;
                cfg.use_high = false;
            }
        }
        cfg
    }
}

/// Settings shared by every harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seeds: Vec<u64>,
    pub split: (f64, f64, f64),
    pub model: ModelConfig,
    pub train: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seeds: (0..5).collect(),
            split: (0.4, 0.2, 0.4),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::invalid("at least one seed is required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClipExperimentConfig {
    pub mode: ClipMode,
    pub ratios: Vec<f64>,
    pub variants: Vec<ClipVariant>,
    pub base: ExperimentConfig,
}

impl Default for ClipExperimentConfig {
    fn default() -> Self {
        ClipExperimentConfig {
            mode: ClipMode::FullGraph,
            ratios: vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            variants: ClipVariant::ALL.to_vec(),
            base: ExperimentConfig::default(),
        }
    }
}

/// One trained and evaluated cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub variant: String,
    pub ratio: f64,
    #[serde(rename = "C")]
    pub order: usize,
    pub flags: String,
    pub seed: u64,
    pub f1_macro: f64,
    pub auc: f64,
    pub wall_ms: u64,
}

/// Enabled model components, e.g. `band+high+env`.
pub fn flags_of(cfg: &ModelConfig) -> String {
    let mut parts = Vec::new();
    match cfg.filter {
        FilterVariant::LowPass => parts.push("adj"),
        FilterVariant::HighPass => parts.push("lap"),
        FilterVariant::Hybrid => {
            if cfg.use_band {
                parts.push("band");
            }
            if cfg.use_high {
                parts.push("high");
            }
        }
    }
    if cfg.use_env {
        parts.push("env");
    }
    parts.join("+")
}

fn seeded_train(cfg: &TrainConfig, seed: u64) -> TrainConfig {
    TrainConfig {
        seed,
        ..cfg.clone()
    }
}

fn split_for(dataset: &Dataset, fractions: (f64, f64, f64), seed: u64) -> Result<SplitMasks> {
    make_split(&dataset.labels, fractions, seed, true)
}

fn run_cell(
    variant: &str,
    ratio: f64,
    dataset: &Dataset,
    splits: &SplitMasks,
    model: &ModelConfig,
    train_cfg: &TrainConfig,
) -> Result<ResultRow> {
    let (_, report) = train(dataset, splits, model, train_cfg)?;
    Ok(ResultRow {
        variant: variant.into(),
        ratio,
        order: model.order,
        flags: flags_of(model),
        seed: train_cfg.seed,
        f1_macro: report.f1_macro,
        auc: report.auc,
        wall_ms: report.wall_time_ms,
    })
}

/// Seed for the edge draw of one (seed, ratio index) cell.
fn clip_seed(seed: u64, ratio_index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ratio_index as u64
}

/// Trains every (variant, ratio, seed) cell on the clipped graph and reports
/// test metrics. Rows are ordered by variant, then ratio, then seed.
pub fn run_clip_experiment(dataset: &Dataset, cfg: &ClipExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.base.validate()?;
    if cfg.ratios.is_empty() || cfg.variants.is_empty() {
        return Err(Error::invalid("clip experiment needs ratios and variants"));
    }
    if cfg.ratios.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("clip ratios must be sorted ascending"));
    }
    if let Some(r) = cfg.ratios.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::invalid(format!("clip ratio {r} outside [0, 1]")));
    }
    let splits: Vec<SplitMasks> = cfg
        .base
        .seeds
        .iter()
        .map(|&s| split_for(dataset, cfg.base.split, s))
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    for &variant in &cfg.variants {
        for (ri, &ratio) in cfg.ratios.iter().enumerate() {
            for (si, &seed) in cfg.base.seeds.iter().enumerate() {
                cells.push((variant, ri, ratio, si, seed));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(variant, ri, ratio, si, seed)| {
            let graph = clip_edges(
                &dataset.graph,
                &dataset.labels,
                cfg.mode,
                ratio,
                clip_seed(seed, ri),
                Some(&splits[si].train),
            )?;
            let clipped = Dataset {
                graph,
                ..dataset.clone()
            };
            run_cell(
                variant.name(),
                ratio,
                &clipped,
                &splits[si],
                &variant.model_config(&cfg.base.model),
                &seeded_train(&cfg.base.train, seed),
            )
        })
        .collect()
}

/// Full model at every order in `orders`, one row per (order, seed).
pub fn run_order_sweep(dataset: &Dataset, orders: &[usize], cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    if orders.is_empty() {
        return Err(Error::invalid("order sweep needs at least one order"));
    }
    let mut cells = Vec::new();
    for &order in orders {
        let model = ModelConfig {
            order,
            ..cfg.model.clone()
        };
        model.validate()?;
        for &seed in &cfg.seeds {
            cells.push((model.clone(), seed));
        }
    }
    cells
        .into_par_iter()
        .map(|(model, seed)| {
            let splits = split_for(dataset, cfg.split, seed)?;
            run_cell("full", 0.0, dataset, &splits, &model, &seeded_train(&cfg.train, seed))
        })
        .collect()
}

pub const ABLATIONS: [&str; 4] = ["full", "w/o high-pass", "w/o band-pass", "w/o env"];

pub fn ablation_config(name: &str, base: &ModelConfig) -> Result<ModelConfig> {
    let mut cfg = ModelConfig {
        filter: FilterVariant::Hybrid,
        use_band: true,
        use_high: true,
        use_env: true,
        ..base.clone()
    };
    match name {
        "full" => {}
        "w/o high-pass" => cfg.use_high = false,
        "w/o band-pass" => cfg.use_band = false,
        "w/o env" => cfg.use_env = false,
        other => return Err(Error::invalid(format!("unknown ablation {other:?}"))),
    }
    Ok(cfg)
}

/// The four ablation rows for every seed, ordered by ablation then seed.
pub fn run_ablation(dataset: &Dataset, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for name in ABLATIONS {
        let model = ablation_config(name, &cfg.model)?;
        model.validate()?;
        for &seed in &cfg.seeds {
            cells.push((name, model.clone(), seed));
        }
    }
    cells
        .into_par_iter()
        .map(|(name, model, seed)| {
            let splits = split_for(dataset, cfg.split, seed)?;
            run_cell(name, 0.0, dataset, &splits, &model, &seeded_train(&cfg.train, seed))
        })
        .collect()
}

/// Aggregate over seeds of one (variant, ratio, order) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variant: String,
    pub ratio: f64,
    #[serde(rename = "C")]
    pub order: usize,
    pub runs: usize,
    pub auc_mean: f64,
    pub auc_sd: f64,
    pub auc_median: f64,
    pub f1_mean: f64,
    pub f1_sd: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Groups rows by (variant, ratio, order) in order of first appearance.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, f64, usize)> = Vec::new();
    for r in rows {
        let key = (r.variant.clone(), r.ratio, r.order);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(variant, ratio, order)| {
            let group: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| r.variant == variant && r.ratio == ratio && r.order == order)
                .collect();
            let aucs: Vec<f64> = group.iter().map(|r| r.auc).collect();
            let f1s: Vec<f64> = group.iter().map(|r| r.f1_macro).collect();
            let (auc_mean, auc_sd) = mean_sd(&aucs);
            let (f1_mean, f1_sd) = mean_sd(&f1s);
            SummaryRow {
                variant,
                ratio,
                order,
                runs: group.len(),
                auc_mean,
                auc_sd,
                auc_median: median(&aucs),
                f1_mean,
                f1_sd,
            }
        })
        .collect()
}

/// Median AUC over the rows matching `variant` and `ratio`.
pub fn median_auc(rows: &[ResultRow], variant: &str, ratio: f64) -> Option<f64> {
    let aucs: Vec<f64> = rows
        .iter()
        .filter(|r| r.variant == variant && r.ratio == ratio)
        .map(|r| r.auc)
        .collect();
    (!aucs.is_empty()).then(|| median(&aucs))
}

/// Serializes rows as CSV with a header line.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Serde(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Serde(e.to_string()))
}

pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))
}
