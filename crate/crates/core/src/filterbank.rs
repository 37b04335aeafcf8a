//! Hybrid spectral filter bank.
//!
//! The bank of order `C` holds `C + 1` beta-wavelet band-pass kernels
//!
//! ```text
//! W_{p,q} = (L/2)^p (I - L/2)^q / (2 B(p+1, q+1)),   p + q = C
//! ```
//!
//! followed by `C - 1` high-pass kernels `R_k = ((ε - 1) I + L)^k`. Kernels are
//! never materialized; each one is evaluated as a chain of sparse products
//! described by a [`FilterPlan`], which both the plain evaluator here and the
//! autodiff tape in [`crate::nn`] execute.

use ndarray::{Array2, ArrayView2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SparseMatrix;

/// Largest `p + q` for which the normalizing factorials are exact.
pub const MAX_BETA_ORDER: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BandSpec {
    BandPass { p: usize, q: usize },
    HighPass { k: usize, epsilon: f64 },
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// 1 / (2 B(p+1, q+1)) = (p+q+1)! / (2 p! q!)
pub fn beta_norm(p: usize, q: usize) -> Result<f64> {
    if p + q > MAX_BETA_ORDER {
        return Err(Error::TooLarge(format!(
            "beta wavelet order {} exceeds {MAX_BETA_ORDER}",
            p + q
        )));
    }
    let ratio = factorial(p + q + 1) / (factorial(p) * factorial(q));
    Ok(ratio as f64 / 2.0)
}

/// Scalar frequency response of a band at eigenvalue `lambda`.
pub fn band_response(spec: BandSpec, lambda: f64) -> f64 {
    match spec {
        BandSpec::BandPass { p, q } => {
            let norm = beta_norm(p, q).expect("band order validated at construction");
            (lambda / 2.0).powi(p as i32) * (1.0 - lambda / 2.0).powi(q as i32) * norm
        }
        BandSpec::HighPass { k, epsilon } => (epsilon - 1.0 + lambda).powi(k as i32),
    }
}

/// Ordered band list: band-pass `W_{0,C} … W_{C,0}` then high-pass `R_1 … R_{C-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridFilterBank {
    order: usize,
    epsilon: f64,
    include_band_pass: bool,
    include_high_pass: bool,
    bands: Vec<BandSpec>,
}

impl HybridFilterBank {
    pub fn new(
        order: usize,
        epsilon: f64,
        include_band_pass: bool,
        include_high_pass: bool,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("filter bank order must be at least 1"));
        }
        if order > MAX_BETA_ORDER {
            return Err(Error::TooLarge(format!(
                "filter bank order {order} exceeds {MAX_BETA_ORDER}"
            )));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::invalid(format!("epsilon {epsilon} outside [0, 1]")));
        }
        let mut bands = Vec::with_capacity(2 * order);
        if include_band_pass {
            bands.extend((0..=order).map(|p| BandSpec::BandPass { p, q: order - p }));
        }
        if include_high_pass {
            bands.extend((1..order).map(|k| BandSpec::HighPass { k, epsilon }));
        }
        Ok(HybridFilterBank {
            order,
            epsilon,
            include_band_pass,
            include_high_pass,
            bands,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn bands(&self) -> &[BandSpec] {
        &self.bands
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    /// Evaluation plan sharing the `(I - L/2)^q` and high-pass power chains
    /// across bands.
    pub fn plan(&self) -> FilterPlan {
        let c = self.order;
        let mut plan = FilterPlan::default();
        if self.include_band_pass {
            // chain[q] = (I - L/2)^q H
            let mut chain = vec![0];
            for _ in 0..c {
                let prev = *chain.last().unwrap();
                chain.push(plan.push(PlanStep::Propagate {
                    src: prev,
                    lap_coef: -0.5,
                    id_coef: 1.0,
                }));
            }
            for p in 0..=c {
                let q = c - p;
                let mut slot = chain[q];
                for _ in 0..p {
                    slot = plan.push(PlanStep::Propagate {
                        src: slot,
                        lap_coef: 0.5,
                        id_coef: 0.0,
                    });
                }
                let factor = beta_norm(p, q).expect("order checked in constructor");
                let out = plan.push(PlanStep::Scale { src: slot, factor });
                plan.outputs.push(out);
            }
        }
        if self.include_high_pass {
            let mut slot = 0;
            for _ in 1..c {
                slot = plan.push(PlanStep::Propagate {
                    src: slot,
                    lap_coef: 1.0,
                    id_coef: self.epsilon - 1.0,
                });
                plan.outputs.push(slot);
            }
        }
        plan
    }
}

/// One step of a filter plan. Slot 0 holds the input; step `i` writes slot `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanStep {
    /// `lap_coef · L · x + id_coef · x`
    Propagate {
        src: usize,
        lap_coef: f64,
        id_coef: f64,
    },
    Scale {
        src: usize,
        factor: f64,
    },
}

/// Straight-line program of Laplacian polynomial evaluations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterPlan {
    steps: Vec<PlanStep>,
    outputs: Vec<usize>,
}

/// Something that can carry out plan steps (plain arrays or tape variables).
pub trait PlanBackend {
    type Value: Clone;
    fn propagate(&mut self, x: &Self::Value, lap_coef: f64, id_coef: f64) -> Result<Self::Value>;
    fn scale(&mut self, x: &Self::Value, factor: f64) -> Result<Self::Value>;
}

impl FilterPlan {
    fn push(&mut self, step: PlanStep) -> usize {
        self.steps.push(step);
        self.steps.len()
    }

    /// Plan for a single band, recomputed from scratch.
    pub fn for_band(spec: BandSpec) -> Result<Self> {
        let mut plan = FilterPlan::default();
        let mut slot = 0;
        match spec {
            BandSpec::BandPass { p, q } => {
                let factor = beta_norm(p, q)?;
                for _ in 0..q {
                    slot = plan.push(PlanStep::Propagate {
                        src: slot,
                        lap_coef: -0.5,
                        id_coef: 1.0,
                    });
                }
                for _ in 0..p {
                    slot = plan.push(PlanStep::Propagate {
                        src: slot,
                        lap_coef: 0.5,
                        id_coef: 0.0,
                    });
                }
                slot = plan.push(PlanStep::Scale { src: slot, factor });
            }
            BandSpec::HighPass { k, epsilon } => {
                if !(0.0..=1.0).contains(&epsilon) {
                    return Err(Error::invalid(format!("epsilon {epsilon} outside [0, 1]")));
                }
                for _ in 0..k {
                    slot = plan.push(PlanStep::Propagate {
                        src: slot,
                        lap_coef: 1.0,
                        id_coef: epsilon - 1.0,
                    });
                }
            }
        }
        plan.outputs.push(slot);
        Ok(plan)
    }

    /// `layers` rounds of normalized-adjacency propagation, `(I - L)^layers`.
    pub fn low_pass(layers: usize) -> Self {
        let mut plan = FilterPlan::default();
        let mut slot = 0;
        for _ in 0..layers {
            slot = plan.push(PlanStep::Propagate {
                src: slot,
                lap_coef: -1.0,
                id_coef: 1.0,
            });
        }
        plan.outputs.push(slot);
        plan
    }

    /// A single multiplication by the Laplacian.
    pub fn laplacian() -> Self {
        let mut plan = FilterPlan::default();
        let slot = plan.push(PlanStep::Propagate {
            src: 0,
            lap_coef: 1.0,
            id_coef: 0.0,
        });
        plan.outputs.push(slot);
        plan
    }

    pub fn steps(&self) -> &[PlanStep] {
        &self.steps
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Runs the plan, returning one value per output in plan order.
    pub fn run<B: PlanBackend>(&self, backend: &mut B, input: B::Value) -> Result<Vec<B::Value>> {
        let mut slots = Vec::with_capacity(self.steps.len() + 1);
        slots.push(input);
        for step in &self.steps {
            let value = match *step {
                PlanStep::Propagate {
                    src,
                    lap_coef,
                    id_coef,
                } => backend.propagate(&slots[src], lap_coef, id_coef)?,
                PlanStep::Scale { src, factor } => backend.scale(&slots[src], factor)?,
            };
            slots.push(value);
        }
        Ok(self.outputs.iter().map(|&i| slots[i].clone()).collect())
    }
}

/// `lap_coef · L · x + id_coef · x`, the one primitive every band is built from.
pub fn propagate(
    laplacian: &SparseMatrix,
    x: ArrayView2<f64>,
    lap_coef: f64,
    id_coef: f64,
) -> Result<Array2<f64>> {
    if laplacian.nrows() != laplacian.ncols() {
        return Err(Error::invalid("filter operator must be square"));
    }
    let mut out = laplacian.spmm(x)?;
    if id_coef == 0.0 {
        out.mapv_inplace(|v| lap_coef * v);
    } else {
        Zip::from(&mut out)
            .and(&x)
            .for_each(|o, &xi| *o = lap_coef * *o + id_coef * xi);
    }
    Ok(out)
}

struct DenseBackend<'a> {
    laplacian: &'a SparseMatrix,
}

impl PlanBackend for DenseBackend<'_> {
    type Value = Array2<f64>;

    fn propagate(&mut self, x: &Array2<f64>, lap_coef: f64, id_coef: f64) -> Result<Array2<f64>> {
        propagate(self.laplacian, x.view(), lap_coef, id_coef)
    }

    fn scale(&mut self, x: &Array2<f64>, factor: f64) -> Result<Array2<f64>> {
        Ok(x * factor)
    }
}

/// Applies a plan to `h` with the given (normalized) Laplacian.
pub fn apply_plan(plan: &FilterPlan, laplacian: &SparseMatrix, h: &Array2<f64>) -> Result<Vec<Array2<f64>>> {
    plan.run(&mut DenseBackend { laplacian }, h.clone())
}

pub fn apply_band(spec: BandSpec, laplacian: &SparseMatrix, h: &Array2<f64>) -> Result<Array2<f64>> {
    let mut out = apply_plan(&FilterPlan::for_band(spec)?, laplacian, h)?;
    Ok(out.pop().expect("single-band plan has one output"))
}

/// One output per band, in bank order.
pub fn apply_bank(
    bank: &HybridFilterBank,
    laplacian: &SparseMatrix,
    h0: &Array2<f64>,
) -> Result<Vec<Array2<f64>>> {
    apply_plan(&bank.plan(), laplacian, h0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{LaplacianKind, SparseGraph};
    use ndarray::array;

    #[test]
    fn beta_norm_values() {
        assert_eq!(beta_norm(0, 0).unwrap(), 0.5);
        assert_eq!(beta_norm(0, 1).unwrap(), 1.0);
        assert_eq!(beta_norm(1, 1).unwrap(), 3.0);
        assert!(matches!(beta_norm(11, 10), Err(Error::TooLarge(_))));
    }

    #[test]
    fn responses() {
        assert_eq!(band_response(BandSpec::BandPass { p: 1, q: 0 }, 0.0), 0.0);
        assert_eq!(band_response(BandSpec::BandPass { p: 0, q: 1 }, 0.0), 1.0);
        let hp = BandSpec::HighPass { k: 2, epsilon: 0.5 };
        assert_eq!(band_response(hp, 2.0), 2.25);
    }

    #[test]
    fn bank_layouts() {
        let b = HybridFilterBank::new(2, 0.5, true, true).unwrap();
        assert_eq!(
            b.bands(),
            &[
                BandSpec::BandPass { p: 0, q: 2 },
                BandSpec::BandPass { p: 1, q: 1 },
                BandSpec::BandPass { p: 2, q: 0 },
                BandSpec::HighPass { k: 1, epsilon: 0.5 },
            ]
        );
        assert_eq!(HybridFilterBank::new(1, 0.5, true, true).unwrap().len(), 2);
        let hp_only = HybridFilterBank::new(3, 0.5, false, true).unwrap();
        assert_eq!(
            hp_only.bands(),
            &[
                BandSpec::HighPass { k: 1, epsilon: 0.5 },
                BandSpec::HighPass { k: 2, epsilon: 0.5 },
            ]
        );
        assert!(HybridFilterBank::new(0, 0.5, true, true).is_err());
        assert!(HybridFilterBank::new(2, 1.5, true, true).is_err());
        assert!(HybridFilterBank::new(4, 0.5, false, false).unwrap().is_empty());
    }

    fn cycle(n: usize) -> SparseGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        SparseGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn band_pass_blocks_constant_signal() {
        let l = cycle(6).laplacian(LaplacianKind::SymNormalized);
        let h = Array2::from_elem((6, 1), 2.0);
        let out = apply_band(BandSpec::BandPass { p: 1, q: 0 }, &l, &h).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn unit_epsilon_high_pass_is_laplacian() {
        let l = cycle(5).laplacian(LaplacianKind::SymNormalized);
        let h = array![[1.0, 0.0], [2.0, 1.0], [-1.0, 3.0], [0.5, 0.5], [4.0, -2.0]];
        let out = apply_band(BandSpec::HighPass { k: 1, epsilon: 1.0 }, &l, &h).unwrap();
        assert_eq!(out, l.spmm(h.view()).unwrap());
    }

    #[test]
    fn order_one_bank_sums_to_input() {
        let l = cycle(7).laplacian(LaplacianKind::SymNormalized);
        let h = Array2::from_shape_fn((7, 3), |(i, j)| (i * 3 + j) as f64 * 0.37 - 2.0);
        let bank = HybridFilterBank::new(1, 0.5, true, true).unwrap();
        let out = apply_bank(&bank, &l, &h).unwrap();
        assert_eq!(out.len(), 2);
        let sum = &out[0] + &out[1];
        assert!(sum.iter().zip(h.iter()).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let l = cycle(4).laplacian(LaplacianKind::SymNormalized);
        let h = Array2::zeros((3, 2));
        assert!(apply_band(BandSpec::BandPass { p: 1, q: 1 }, &l, &h).is_err());
    }
}
