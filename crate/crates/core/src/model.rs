//! The detector: hybrid filter bank on a shared MLP embedding, a weighted
//! cross-entropy head, and the local environment constraint.
//!
//! Forward pass:
//!
//! ```text
//! H0     = relu(X W1 + b1)
//! bands  = plan(L_sym) applied to H0
//! H      = concat(bands) | sum(bands)
//! logits = H W2 + b2
//! ```
//!
//! The environment branch compares, for every labeled training node, a
//! self-masked multi-hop neighbor mean of `H0` against the mean of `H0` over
//! the node's feature-space nearest neighbors.

use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{FilterPlan, HybridFilterBank};
use crate::graph::{Label, LabelVector, LaplacianKind, SparseGraph, SparseMatrix};
use crate::nn::{
    cosine_rows, cosine_rows_backward, sigmoid, softplus, CustomOp, ParamTensor, Tape,
    TapeBackend, Var,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Aggregation {
    Concat,
    Sum,
}

/// Weight on the anomaly term of the cross-entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeltaMode {
    /// normal count / anomaly count
    InverseFrequency,
    /// anomaly count / normal count
    PaperLiteral,
}

/// Which propagation the model applies to the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterVariant {
    /// The hybrid band-pass + high-pass bank.
    Hybrid,
    /// Two rounds of normalized-adjacency message passing.
    LowPass,
    /// One multiplication by the normalized Laplacian.
    HighPass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub order: usize,
    pub epsilon: f64,
    pub hidden_dim: usize,
    pub agg: Aggregation,
    pub alpha: f64,
    pub knn_k: usize,
    pub sgc_hops: usize,
    pub delta_mode: DeltaMode,
    pub use_band: bool,
    pub use_high: bool,
    pub use_env: bool,
    pub filter: FilterVariant,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            order: 2,
            epsilon: 0.5,
            hidden_dim: 64,
            agg: Aggregation::Concat,
            alpha: 0.8,
            knn_k: 5,
            sgc_hops: 2,
            delta_mode: DeltaMode::InverseFrequency,
            use_band: true,
            use_high: true,
            use_env: true,
            filter: FilterVariant::Hybrid,
        }
    }
}

pub const LOW_PASS_LAYERS: usize = 2;

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if !(1..=3).contains(&self.sgc_hops) {
            return Err(Error::invalid(format!("sgc_hops {} not in 1..=3", self.sgc_hops)));
        }
        if self.knn_k == 0 {
            return Err(Error::invalid("knn_k must be at least 1"));
        }
        if self.hidden_dim == 0 {
            return Err(Error::invalid("hidden_dim must be at least 1"));
        }
        if self.filter == FilterVariant::Hybrid {
            let bank = self.bank()?;
            if bank.is_empty() {
                return Err(Error::invalid("filter bank has no bands"));
            }
        }
        Ok(())
    }

    pub fn bank(&self) -> Result<HybridFilterBank> {
        HybridFilterBank::new(self.order, self.epsilon, self.use_band, self.use_high)
    }

    pub fn plan(&self) -> Result<FilterPlan> {
        Ok(match self.filter {
            FilterVariant::Hybrid => self.bank()?.plan(),
            FilterVariant::LowPass => FilterPlan::low_pass(LOW_PASS_LAYERS),
            FilterVariant::HighPass => FilterPlan::laplacian(),
        })
    }

    pub fn num_bands(&self) -> Result<usize> {
        Ok(self.plan()?.num_outputs())
    }

    pub fn head_input_dim(&self) -> Result<usize> {
        Ok(match self.agg {
            Aggregation::Concat => self.num_bands()? * self.hidden_dim,
            Aggregation::Sum => self.hidden_dim,
        })
    }

    /// α actually applied; the environment term is dropped when disabled.
    pub fn effective_alpha(&self) -> f64 {
        if self.use_env {
            self.alpha
        } else {
            1.0
        }
    }
}

/// All learnable tensors: `[W1, b1, W2, b2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecGfdParams {
    pub tensors: Vec<ParamTensor>,
}

impl SecGfdParams {
    pub const W1: usize = 0;
    pub const B1: usize = 1;
    pub const W2: usize = 2;
    pub const B2: usize = 3;

    pub fn init(in_dim: usize, cfg: &ModelConfig, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let head_in = cfg.head_input_dim()?;
        Ok(SecGfdParams {
            tensors: vec![
                ParamTensor::glorot(in_dim, cfg.hidden_dim, &mut rng),
                ParamTensor::zeros(1, cfg.hidden_dim),
                ParamTensor::glorot(head_in, 1, &mut rng),
                ParamTensor::zeros(1, 1),
            ],
        })
    }

    pub fn zero_grad(&mut self) {
        self.tensors.iter_mut().for_each(ParamTensor::zero_grad);
    }

    pub fn is_finite(&self) -> bool {
        self.tensors.iter().all(ParamTensor::is_finite)
    }
}

/// Each node's `k` most cosine-similar nodes, most similar first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnnIndex {
    pub neighbors: Vec<Vec<usize>>,
}

impl KnnIndex {
    /// Exact top-k. Ties break toward the smaller node id; a zero-norm row has
    /// similarity −1 to every other node.
    pub fn build(features: ArrayView2<f64>, k: usize) -> Result<Self> {
        let n = features.nrows();
        if n < 2 {
            return Err(Error::invalid("k-nearest neighbors need at least two nodes"));
        }
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        let norms: Vec<f64> = features.outer_iter().map(|r| r.dot(&r).sqrt()).collect();
        let keep = k.min(n - 1);
        let neighbors = (0..n)
            .into_par_iter()
            .map(|t| {
                let row = features.row(t);
                let mut cands: Vec<(f64, usize)> = (0..n)
                    .filter(|&u| u != t)
                    .map(|u| {
                        let sim = if norms[t] == 0.0 || norms[u] == 0.0 {
                            -1.0
                        } else {
                            row.dot(&features.row(u)) / (norms[t] * norms[u])
                        };
                        (sim, u)
                    })
                    .collect();
                let cmp = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
                if keep < cands.len() {
                    cands.select_nth_unstable_by(keep - 1, cmp);
                    cands.truncate(keep);
                }
                cands.sort_by(cmp);
                cands.into_iter().map(|(_, u)| u).collect()
            })
            .collect();
        Ok(KnnIndex { neighbors })
    }

    /// Mean-pooling operator: row t averages rows `K_t`.
    pub fn pool_matrix(&self) -> SparseMatrix {
        let n = self.neighbors.len();
        let rows = self
            .neighbors
            .iter()
            .map(|ns| {
                let w = 1.0 / ns.len().max(1) as f64;
                ns.iter().map(|&u| (u, w)).collect()
            })
            .collect();
        SparseMatrix::from_rows(n, rows).expect("neighbor ids are in range")
    }
}

/// Mean of `h0` rows over each node's nearest neighbors.
pub fn knn_pool(h0: &Array2<f64>, knn: &KnnIndex) -> Result<Array2<f64>> {
    knn.pool_matrix().spmm(h0.view())
}

/// Linear operator `E` with `(E H0)_t` equal to the mean over hops `1..=hops`
/// of mean-aggregation propagation started from `H0` with row `t` zeroed.
///
/// Row t holds `(1/hops) Σ_l (Â^l)_{t,u}` for `u ≠ t`, with `Â = D⁻¹A`. The
/// diagonal is structurally absent, so node t's own row never reaches its
/// neighbor summary.
pub fn sgc_environment_operator(g: &SparseGraph, hops: usize) -> Result<SparseMatrix> {
    if hops == 0 {
        return Err(Error::invalid("sgc hops must be at least 1"));
    }
    let n = g.num_nodes();
    let inv_deg: Vec<f64> = (0..n).map(|v| 1.0 / g.degree(v).max(1) as f64).collect();
    let scale = 1.0 / hops as f64;
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0.0; n], vec![0.0; n], vec![0.0; n]),
            |(walk, next, acc), t| {
                // walk = e_tᵀ Â^l as a dense row, tracked through its support.
                let mut support = vec![t];
                walk[t] = 1.0;
                let mut touched: Vec<usize> = Vec::new();
                for _ in 0..hops {
                    let mut next_support = Vec::new();
                    for &j in &support {
                        let w = walk[j] * inv_deg[j];
                        for &u in g.neighbors(j) {
                            if next[u] == 0.0 {
                                next_support.push(u);
                            }
                            next[u] += w;
                        }
                    }
                    for &j in &support {
                        walk[j] = 0.0;
                    }
                    next_support.sort_unstable();
                    next_support.dedup();
                    for &u in &next_support {
                        walk[u] = next[u];
                        next[u] = 0.0;
                        if acc[u] == 0.0 {
                            touched.push(u);
                        }
                        acc[u] += walk[u];
                    }
                    support = next_support;
                }
                for &j in &support {
                    walk[j] = 0.0;
                }
                touched.sort_unstable();
                touched.dedup();
                let row = touched
                    .iter()
                    .filter(|&&u| u != t)
                    .map(|&u| (u, acc[u] * scale))
                    .collect();
                for &u in &touched {
                    acc[u] = 0.0;
                }
                row
            },
        )
        .collect();
    SparseMatrix::from_rows(n, rows)
}

/// Self-masked multi-hop neighbor representation.
pub fn sgc_neighbor_repr(g: &SparseGraph, h0: &Array2<f64>, hops: usize) -> Result<Array2<f64>> {
    sgc_environment_operator(g, hops)?.spmm(h0.view())
}

/// Class weight δ from the labeled training nodes.
pub fn class_weight(labels: &LabelVector, train_mask: &[bool], mode: DeltaMode) -> Result<f64> {
    let (mut normal, mut anomaly) = (0usize, 0usize);
    for (l, _) in labels.iter().zip(train_mask).filter(|(_, &m)| m) {
        match l {
            Label::Normal => normal += 1,
            Label::Anomaly => anomaly += 1,
            Label::Unknown => {}
        }
    }
    if normal == 0 || anomaly == 0 {
        return Err(Error::invalid(format!(
            "training set needs both classes (normal {normal}, anomaly {anomaly})"
        )));
    }
    Ok(match mode {
        DeltaMode::InverseFrequency => normal as f64 / anomaly as f64,
        DeltaMode::PaperLiteral => anomaly as f64 / normal as f64,
    })
}

/// Labeled training nodes, grouped for both loss terms.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainTargets {
    /// (node, 0/1 target)
    pub targets: Vec<(usize, f64)>,
    pub normals: Vec<usize>,
    pub anomalies: Vec<usize>,
    pub delta: f64,
}

impl TrainTargets {
    pub fn new(labels: &LabelVector, train_mask: &[bool], mode: DeltaMode) -> Result<Self> {
        if labels.len() != train_mask.len() {
            return Err(Error::invalid("label and mask lengths differ"));
        }
        let delta = class_weight(labels, train_mask, mode)?;
        let mut targets = Vec::new();
        let (mut normals, mut anomalies) = (Vec::new(), Vec::new());
        for (v, (l, &m)) in labels.iter().zip(train_mask).enumerate() {
            if !m {
                continue;
            }
            match l {
                Label::Normal => {
                    targets.push((v, 0.0));
                    normals.push(v);
                }
                Label::Anomaly => {
                    targets.push((v, 1.0));
                    anomalies.push(v);
                }
                Label::Unknown => {}
            }
        }
        Ok(TrainTargets {
            targets,
            normals,
            anomalies,
            delta,
        })
    }
}

/// −(1/|T|) Σ [δ·y·log p + (1−y)·log(1−p)] with p = sigmoid(logit), using
/// log p = −softplus(−z) and log(1−p) = −softplus(z).
pub fn weighted_bce(logits: &[f64], targets: &[(usize, f64)], delta: f64) -> f64 {
    let total: f64 = targets
        .iter()
        .map(|&(v, y)| {
            let z = logits[v];
            delta * y * softplus(-z) + (1.0 - y) * softplus(z)
        })
        .sum();
    total / targets.len() as f64
}

fn weighted_bce_grad(logits: &[f64], targets: &[(usize, f64)], delta: f64) -> Vec<f64> {
    let mut g = vec![0.0; logits.len()];
    let scale = 1.0 / targets.len() as f64;
    for &(v, y) in targets {
        let p = sigmoid(logits[v]);
        g[v] += scale * (-delta * y * (1.0 - p) + (1.0 - y) * p);
    }
    g
}

/// Weighted cross-entropy over the training mask with δ taken from it.
pub fn hybrid_loss(
    logits: &[f64],
    labels: &LabelVector,
    train_mask: &[bool],
    mode: DeltaMode,
) -> Result<f64> {
    let t = TrainTargets::new(labels, train_mask, mode)?;
    Ok(weighted_bce(logits, &t.targets, t.delta))
}

/// −log(mean_{normal} e^{s} / mean_{anomaly} e^{s}).
pub fn env_loss_from_similarities(normal: &[f64], anomaly: &[f64]) -> Result<f64> {
    if normal.is_empty() || anomaly.is_empty() {
        return Err(Error::invalid("environment loss needs both classes"));
    }
    let mean_exp = |s: &[f64]| s.iter().map(|v| v.exp()).sum::<f64>() / s.len() as f64;
    Ok(-(mean_exp(normal).ln() - mean_exp(anomaly).ln()))
}

pub fn env_loss(
    neigh: &Array2<f64>,
    knn: &Array2<f64>,
    labels: &LabelVector,
    train_mask: &[bool],
) -> Result<f64> {
    let t = TrainTargets::new(labels, train_mask, DeltaMode::InverseFrequency)?;
    let s = cosine_rows(neigh, knn);
    let pick = |ids: &[usize]| ids.iter().map(|&v| s[v]).collect::<Vec<_>>();
    env_loss_from_similarities(&pick(&t.normals), &pick(&t.anomalies))
}

pub fn total_loss(hybrid: f64, env: f64, alpha: f64) -> f64 {
    alpha * hybrid + (1.0 - alpha) * env
}

struct BceOp<'a> {
    targets: &'a TrainTargets,
}

impl CustomOp for BceOp<'_> {
    fn backward(
        &self,
        inputs: &[&Array2<f64>],
        _output: &Array2<f64>,
        upstream: &Array2<f64>,
    ) -> Result<Vec<Array2<f64>>> {
        let logits = inputs[0].column(0).to_vec();
        let g = weighted_bce_grad(&logits, &self.targets.targets, self.targets.delta);
        let up = upstream[[0, 0]];
        Ok(vec![Array2::from_shape_fn((g.len(), 1), |(i, _)| up * g[i])])
    }
}

struct EnvOp<'a> {
    targets: &'a TrainTargets,
}

impl CustomOp for EnvOp<'_> {
    fn backward(
        &self,
        inputs: &[&Array2<f64>],
        _output: &Array2<f64>,
        upstream: &Array2<f64>,
    ) -> Result<Vec<Array2<f64>>> {
        let (neigh, knn) = (inputs[0], inputs[1]);
        let s = cosine_rows(neigh, knn);
        let up = upstream[[0, 0]];
        let mut w = vec![0.0; s.len()];
        let z_n: f64 = self.targets.normals.iter().map(|&v| s[v].exp()).sum();
        let z_a: f64 = self.targets.anomalies.iter().map(|&v| s[v].exp()).sum();
        for &v in &self.targets.normals {
            w[v] = -up * s[v].exp() / z_n;
        }
        for &v in &self.targets.anomalies {
            w[v] = up * s[v].exp() / z_a;
        }
        let (ga, gb) = cosine_rows_backward(neigh, knn, &w);
        Ok(vec![ga, gb])
    }
}

/// Everything derived from raw inputs once, before training.
#[derive(Debug, Clone)]
pub struct ModelContext {
    pub laplacian: SparseMatrix,
    pub plan: FilterPlan,
    pub env: Option<EnvOperators>,
}

#[derive(Debug, Clone)]
pub struct EnvOperators {
    pub neighbor: SparseMatrix,
    pub knn_pool: SparseMatrix,
}

impl ModelContext {
    pub fn new(g: &SparseGraph, features: &Array2<f64>, cfg: &ModelConfig) -> Result<Self> {
        cfg.validate()?;
        if features.nrows() != g.num_nodes() {
            return Err(Error::invalid(format!(
                "{} feature rows for {} nodes",
                features.nrows(),
                g.num_nodes()
            )));
        }
        let env = if cfg.use_env {
            Some(EnvOperators {
                neighbor: sgc_environment_operator(g, cfg.sgc_hops)?,
                knn_pool: KnnIndex::build(features.view(), cfg.knn_k)?.pool_matrix(),
            })
        } else {
            None
        };
        Ok(ModelContext {
            laplacian: g.laplacian(LaplacianKind::SymNormalized),
            plan: cfg.plan()?,
            env,
        })
    }
}

/// Tape handles produced by [`record_forward`].
#[derive(Debug, Clone)]
pub struct ForwardVars {
    pub h0: Var,
    pub bands: Vec<Var>,
    pub hidden: Var,
    pub logits: Var,
    /// (neighbor summary, knn summary), when the environment branch is on.
    pub env: Option<(Var, Var)>,
}

pub fn record_forward<'g>(
    tape: &mut Tape<'g>,
    params: &SecGfdParams,
    ctx: &'g ModelContext,
    features: &Array2<f64>,
    cfg: &ModelConfig,
) -> Result<ForwardVars> {
    if features.nrows() != ctx.laplacian.nrows() {
        return Err(Error::invalid("feature rows do not match graph size"));
    }
    let p = &params.tensors;
    let x = tape.constant(features.clone());
    let w1 = tape.param(SecGfdParams::W1, &p[SecGfdParams::W1]);
    let b1 = tape.param(SecGfdParams::B1, &p[SecGfdParams::B1]);
    let pre = tape.affine(x, w1, b1)?;
    let h0 = tape.relu(pre);
    let bands = ctx.plan.run(
        &mut TapeBackend {
            tape,
            laplacian: &ctx.laplacian,
        },
        h0,
    )?;
    let hidden = match cfg.agg {
        Aggregation::Concat => tape.concat(&bands)?,
        Aggregation::Sum => tape.sum(&bands)?,
    };
    let w2 = tape.param(SecGfdParams::W2, &p[SecGfdParams::W2]);
    let b2 = tape.param(SecGfdParams::B2, &p[SecGfdParams::B2]);
    let logits = tape.affine(hidden, w2, b2)?;
    let env = match &ctx.env {
        Some(ops) => {
            let neigh = tape.sparse_affine(&ops.neighbor, h0, 1.0, 0.0)?;
            let knn = tape.sparse_affine(&ops.knn_pool, h0, 1.0, 0.0)?;
            Some((neigh, knn))
        }
        None => None,
    };
    Ok(ForwardVars {
        h0,
        bands,
        hidden,
        logits,
        env,
    })
}

/// Sigmoid kept strictly inside (0, 1) where f64 would round to an endpoint.
pub fn probability(logit: f64) -> f64 {
    sigmoid(logit).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Materialized forward pass.
#[derive(Debug, Clone)]
pub struct ForwardOutput {
    pub h0: Array2<f64>,
    pub bands: Vec<Array2<f64>>,
    pub hidden: Array2<f64>,
    pub logits: Vec<f64>,
    pub probs: Vec<f64>,
}

pub fn forward(
    params: &SecGfdParams,
    ctx: &ModelContext,
    features: &Array2<f64>,
    cfg: &ModelConfig,
) -> Result<ForwardOutput> {
    let mut tape = Tape::new();
    let vars = record_forward(&mut tape, params, ctx, features, cfg)?;
    let logits: Vec<f64> = tape.value(vars.logits).column(0).to_vec();
    Ok(ForwardOutput {
        h0: tape.value(vars.h0).clone(),
        bands: vars.bands.iter().map(|&b| tape.value(b).clone()).collect(),
        hidden: tape.value(vars.hidden).clone(),
        probs: logits.iter().map(|&z| probability(z)).collect(),
        logits,
    })
}

/// Loss terms of one evaluation of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub total: f64,
    pub hybrid: f64,
    pub env: Option<f64>,
}

/// Evaluates α·L_hybrid + (1−α)·L_env; when `params` is mutable the caller can
/// follow with [`Tape::backward`] on the returned root.
pub fn record_objective<'g>(
    tape: &mut Tape<'g>,
    params: &SecGfdParams,
    ctx: &'g ModelContext,
    features: &Array2<f64>,
    targets: &'g TrainTargets,
    cfg: &ModelConfig,
) -> Result<(Var, LossBreakdown)> {
    let vars = record_forward(tape, params, ctx, features, cfg)?;
    let logits: Vec<f64> = tape.value(vars.logits).column(0).to_vec();
    let hybrid = weighted_bce(&logits, &targets.targets, targets.delta);
    let hybrid_var = tape.custom(
        &[vars.logits],
        Array2::from_elem((1, 1), hybrid),
        Box::new(BceOp { targets }),
    );
    let alpha = cfg.effective_alpha();
    match vars.env {
        Some((neigh, knn)) if alpha < 1.0 => {
            let s = cosine_rows(tape.value(neigh), tape.value(knn));
            let pick = |ids: &[usize]| ids.iter().map(|&v| s[v]).collect::<Vec<_>>();
            let env = env_loss_from_similarities(&pick(&targets.normals), &pick(&targets.anomalies))?;
            let env_var = tape.custom(
                &[neigh, knn],
                Array2::from_elem((1, 1), env),
                Box::new(EnvOp { targets }),
            );
            let a = tape.scale(hybrid_var, alpha);
            let b = tape.scale(env_var, 1.0 - alpha);
            let root = tape.add(a, b)?;
            let total = tape.value(root)[[0, 0]];
            Ok((
                root,
                LossBreakdown {
                    total,
                    hybrid,
                    env: Some(env),
                },
            ))
        }
        _ => Ok((
            hybrid_var,
            LossBreakdown {
                total: hybrid,
                hybrid,
                env: None,
            },
        )),
    }
}

/// Objective value without gradients.
pub fn objective(
    params: &SecGfdParams,
    ctx: &ModelContext,
    features: &Array2<f64>,
    targets: &TrainTargets,
    cfg: &ModelConfig,
) -> Result<LossBreakdown> {
    let mut tape = Tape::new();
    Ok(record_objective(&mut tape, params, ctx, features, targets, cfg)?.1)
}

/// Objective value with gradients written into `params` (previous gradients
/// are cleared first).
pub fn objective_and_grad(
    params: &mut SecGfdParams,
    ctx: &ModelContext,
    features: &Array2<f64>,
    targets: &TrainTargets,
    cfg: &ModelConfig,
) -> Result<LossBreakdown> {
    params.zero_grad();
    let mut tape = Tape::new();
    let (root, losses) = record_objective(&mut tape, params, ctx, features, targets, cfg)?;
    tape.backward(root, Array2::ones((1, 1)), &mut params.tensors)?;
    Ok(losses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn bce_hand_value() {
        // anomaly at p = 0.5, normal at p ≈ 0
        let loss = weighted_bce(&[0.0, -60.0], &[(0, 1.0), (1, 0.0)], 0.25);
        assert!((loss - 0.25 * 2f64.ln() / 2.0).abs() < 1e-12);
        assert!((loss - 0.0866).abs() < 1e-4);
    }

    #[test]
    fn bce_confident_predictions_vanish() {
        let loss = weighted_bce(&[40.0, -40.0], &[(0, 1.0), (1, 0.0)], 3.0);
        assert!(loss <= 1e-6);
    }

    #[test]
    fn delta_from_counts() {
        let mut flags = vec![false; 90];
        flags.extend(vec![true; 10]);
        let labels = LabelVector::from_flags(&flags);
        let mask = vec![true; 100];
        assert_eq!(class_weight(&labels, &mask, DeltaMode::InverseFrequency).unwrap(), 9.0);
        assert_eq!(class_weight(&labels, &mask, DeltaMode::PaperLiteral).unwrap(), 1.0 / 9.0);
        let single = LabelVector::from_flags(&[false; 4]);
        assert!(class_weight(&single, &[true; 4], DeltaMode::InverseFrequency).is_err());
    }

    #[test]
    fn env_loss_examples() {
        assert_eq!(env_loss_from_similarities(&[0.3, 0.3], &[0.3]).unwrap(), 0.0);
        assert!((env_loss_from_similarities(&[1.0], &[-1.0]).unwrap() + 2.0).abs() < 1e-12);
        assert!((env_loss_from_similarities(&[1.0, 1.0], &[0.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!(env_loss_from_similarities(&[], &[0.0]).is_err());
    }

    #[test]
    fn total_loss_mixing() {
        assert_eq!(total_loss(0.7, -1.0, 1.0), 0.7);
        assert_eq!(total_loss(0.7, -1.0, 0.0), -1.0);
        assert!((total_loss(0.5, -1.0, 0.8) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn knn_duplicates_and_orthogonal_ties() {
        let x = array![[1.0, 2.0], [1.0, 2.0], [-3.0, 0.5]];
        let knn = KnnIndex::build(x.view(), 1).unwrap();
        assert_eq!(knn.neighbors[0], vec![1]);
        assert_eq!(knn.neighbors[1], vec![0]);

        let eye = Array2::<f64>::eye(4);
        let knn = KnnIndex::build(eye.view(), 2).unwrap();
        assert_eq!(knn.neighbors[0], vec![1, 2]);
        assert_eq!(knn.neighbors[2], vec![0, 1]);
        assert_eq!(knn.neighbors[3], vec![0, 1]);

        assert!(KnnIndex::build(array![[1.0]].view(), 1).is_err());
        let capped = KnnIndex::build(eye.view(), 10).unwrap();
        assert!(capped.neighbors.iter().all(|ns| ns.len() == 3));
    }

    #[test]
    fn knn_zero_rows_rank_last() {
        let x = array![[0.0, 0.0], [1.0, 0.0], [-1.0, 0.1]];
        let knn = KnnIndex::build(x.view(), 1).unwrap();
        // -0.99 similarity still beats the zero row's -1
        assert_eq!(knn.neighbors[1], vec![2]);
        assert_eq!(knn.neighbors[0], vec![1]);
    }

    #[test]
    fn knn_pool_examples() {
        let z = array![[1.0, -2.0, 0.5]];
        let h0 = Array2::from_shape_fn((4, 3), |(_, j)| z[[0, j]]);
        let knn = KnnIndex {
            neighbors: vec![vec![1, 2], vec![0], vec![3, 1], vec![0, 1]],
        };
        let pooled = knn_pool(&h0, &knn).unwrap();
        assert!(pooled.outer_iter().all(|r| r == z.row(0)));

        let h0 = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0], [7.0, 8.0]];
        let pooled = knn_pool(&h0, &knn).unwrap();
        assert_eq!(pooled.row(1), h0.row(0));
    }

    #[test]
    fn sgc_isolated_and_star() {
        let g = SparseGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let mut h0 = Array2::from_elem((5, 2), 0.0);
        for v in 1..4 {
            h0.row_mut(v).assign(&array![2.0, -1.0]);
        }
        h0.row_mut(0).assign(&array![100.0, 100.0]);
        h0.row_mut(4).assign(&array![7.0, 7.0]);
        let r = sgc_neighbor_repr(&g, &h0, 1).unwrap();
        assert_eq!(r.row(0), array![2.0, -1.0]);
        assert_eq!(r.row(4), array![0.0, 0.0]);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ModelConfig::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.head_input_dim().unwrap(), 4 * 64);
        cfg.alpha = 1.5;
        assert!(cfg.validate().is_err());
        cfg = ModelConfig {
            sgc_hops: 4,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg = ModelConfig {
            use_band: false,
            use_high: false,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg = ModelConfig {
            agg: Aggregation::Sum,
            ..Default::default()
        };
        assert_eq!(cfg.head_input_dim().unwrap(), 64);
    }
}
