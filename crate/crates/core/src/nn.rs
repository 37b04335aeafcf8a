//! Minimal dense neural-network kernel.
//!
//! A [`Tape`] records a forward pass over a fixed set of matrix ops and replays
//! it in reverse to accumulate exact gradients into [`ParamTensor`]s. Ops that
//! are specific to one model (the training losses) plug in through
//! [`CustomOp`].

use ndarray::{Array2, Axis, Zip};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{propagate, PlanBackend};
use crate::graph::SparseMatrix;

/// Learnable matrix with paired gradient storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamTensor {
    pub value: Array2<f64>,
    #[serde(skip, default = "empty")]
    pub grad: Array2<f64>,
}

fn empty() -> Array2<f64> {
    Array2::zeros((0, 0))
}

impl ParamTensor {
    pub fn new(value: Array2<f64>) -> Self {
        let grad = Array2::zeros(value.raw_dim());
        ParamTensor { value, grad }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(Array2::zeros((rows, cols)))
    }

    /// Glorot-uniform initialization.
    pub fn glorot<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let bound = (6.0 / (rows + cols) as f64).sqrt();
        Self::new(Array2::from_shape_simple_fn((rows, cols), || {
            rng.random_range(-bound..bound)
        }))
    }

    pub fn zero_grad(&mut self) {
        if self.grad.raw_dim() != self.value.raw_dim() {
            self.grad = Array2::zeros(self.value.raw_dim());
        } else {
            self.grad.fill(0.0);
        }
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.value.iter().all(|v| v.is_finite())
    }
}

pub fn relu(x: f64) -> f64 {
    x.max(0.0)
}

pub fn relu_grad(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Logistic function, evaluated on the branch that cannot overflow.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn sigmoid_grad(x: f64) -> f64 {
    let s = sigmoid(x);
    s * (1.0 - s)
}

/// ln(1 + eˣ) without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Row-wise cosine similarity; a zero row gives similarity 0.
pub fn cosine_rows(a: &Array2<f64>, b: &Array2<f64>) -> Vec<f64> {
    a.outer_iter()
        .zip(b.outer_iter())
        .map(|(x, y)| {
            let nx = x.dot(&x).sqrt();
            let ny = y.dot(&y).sqrt();
            if nx == 0.0 || ny == 0.0 {
                0.0
            } else {
                x.dot(&y) / (nx * ny)
            }
        })
        .collect()
}

/// Gradients of Σᵢ wᵢ·cos(aᵢ, bᵢ) with respect to `a` and `b`.
pub fn cosine_rows_backward(
    a: &Array2<f64>,
    b: &Array2<f64>,
    weights: &[f64],
) -> (Array2<f64>, Array2<f64>) {
    let mut ga = Array2::zeros(a.raw_dim());
    let mut gb = Array2::zeros(b.raw_dim());
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let (x, y) = (a.row(i), b.row(i));
        let nx = x.dot(&x).sqrt();
        let ny = y.dot(&y).sqrt();
        if nx == 0.0 || ny == 0.0 {
            continue;
        }
        let s = x.dot(&y) / (nx * ny);
        let inv = 1.0 / (nx * ny);
        Zip::from(ga.row_mut(i))
            .and(&x)
            .and(&y)
            .for_each(|g, &xi, &yi| *g = w * (yi * inv - s * xi / (nx * nx)));
        Zip::from(gb.row_mut(i))
            .and(&x)
            .and(&y)
            .for_each(|g, &xi, &yi| *g = w * (xi * inv - s * yi / (ny * ny)));
    }
    (ga, gb)
}

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

/// Backward rule for an op defined outside this module.
pub trait CustomOp {
    /// Returns one gradient per input, in input order.
    fn backward(
        &self,
        inputs: &[&Array2<f64>],
        output: &Array2<f64>,
        upstream: &Array2<f64>,
    ) -> Result<Vec<Array2<f64>>>;
}

enum Op<'g> {
    Constant,
    Param(usize),
    MatMul(Var, Var),
    AddBias(Var, Var),
    Relu(Var),
    SparseAffine {
        x: Var,
        matrix: &'g SparseMatrix,
        lap_coef: f64,
        id_coef: f64,
    },
    Scale(Var, f64),
    Add(Var, Var),
    Sum(Vec<Var>),
    Concat(Vec<Var>),
    Custom(Vec<Var>, Box<dyn CustomOp + 'g>),
}

struct Node<'g> {
    value: Array2<f64>,
    op: Op<'g>,
}

/// Recorded forward pass.
#[derive(Default)]
pub struct Tape<'g> {
    nodes: Vec<Node<'g>>,
}

impl<'g> Tape<'g> {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    fn push(&mut self, value: Array2<f64>, op: Op<'g>) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Array2<f64> {
        &self.nodes[v.0].value
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn constant(&mut self, value: Array2<f64>) -> Var {
        self.push(value, Op::Constant)
    }

    /// Records parameter `index` of the slice later passed to [`Tape::backward`].
    pub fn param(&mut self, index: usize, p: &ParamTensor) -> Var {
        self.push(p.value.clone(), Op::Param(index))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (va, vb) = (self.value(a), self.value(b));
        if va.ncols() != vb.nrows() {
            return Err(Error::invalid(format!(
                "matmul shape mismatch: {:?} x {:?}",
                va.dim(),
                vb.dim()
            )));
        }
        let out = va.dot(vb);
        Ok(self.push(out, Op::MatMul(a, b)))
    }

    /// Adds a 1×m bias row to every row of `a`.
    pub fn add_bias(&mut self, a: Var, bias: Var) -> Result<Var> {
        let (va, vb) = (self.value(a), self.value(bias));
        if vb.nrows() != 1 || vb.ncols() != va.ncols() {
            return Err(Error::invalid(format!(
                "bias shape {:?} does not fit {:?}",
                vb.dim(),
                va.dim()
            )));
        }
        let out = va + vb;
        Ok(self.push(out, Op::AddBias(a, bias)))
    }

    /// `x W + b`
    pub fn affine(&mut self, x: Var, w: Var, b: Var) -> Result<Var> {
        let xw = self.matmul(x, w)?;
        self.add_bias(xw, b)
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let out = self.value(a).mapv(relu);
        self.push(out, Op::Relu(a))
    }

    /// `lap_coef · S · x + id_coef · x` for a constant sparse `S`.
    pub fn sparse_affine(
        &mut self,
        matrix: &'g SparseMatrix,
        x: Var,
        lap_coef: f64,
        id_coef: f64,
    ) -> Result<Var> {
        let out = if id_coef == 0.0 && lap_coef == 1.0 {
            matrix.spmm(self.value(x).view())?
        } else {
            propagate(matrix, self.value(x).view(), lap_coef, id_coef)?
        };
        Ok(self.push(
            out,
            Op::SparseAffine {
                x,
                matrix,
                lap_coef,
                id_coef,
            },
        ))
    }

    pub fn scale(&mut self, a: Var, factor: f64) -> Var {
        let out = self.value(a) * factor;
        self.push(out, Op::Scale(a, factor))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        if self.value(a).dim() != self.value(b).dim() {
            return Err(Error::invalid("add shape mismatch"));
        }
        let out = self.value(a) + self.value(b);
        Ok(self.push(out, Op::Add(a, b)))
    }

    /// Elementwise sum of equally shaped values.
    pub fn sum(&mut self, parts: &[Var]) -> Result<Var> {
        let first = *parts
            .first()
            .ok_or_else(|| Error::invalid("sum of zero operands"))?;
        let mut out = self.value(first).clone();
        for &p in &parts[1..] {
            if self.value(p).dim() != out.dim() {
                return Err(Error::invalid("sum shape mismatch"));
            }
            out += self.value(p);
        }
        Ok(self.push(out, Op::Sum(parts.to_vec())))
    }

    /// Column-wise concatenation.
    pub fn concat(&mut self, parts: &[Var]) -> Result<Var> {
        if parts.is_empty() {
            return Err(Error::invalid("concat of zero operands"));
        }
        let views: Vec<_> = parts.iter().map(|&p| self.value(p).view()).collect();
        let out = ndarray::concatenate(Axis(1), &views)
            .map_err(|e| Error::invalid(format!("concat: {e}")))?;
        Ok(self.push(out, Op::Concat(parts.to_vec())))
    }

    pub fn custom(
        &mut self,
        inputs: &[Var],
        value: Array2<f64>,
        op: Box<dyn CustomOp + 'g>,
    ) -> Var {
        self.push(value, Op::Custom(inputs.to_vec(), op))
    }

    /// Reverse pass from `root` seeded with `upstream`; parameter gradients are
    /// added into `params[i].grad`.
    pub fn backward(&self, root: Var, upstream: Array2<f64>, params: &mut [ParamTensor]) -> Result<()> {
        if root.0 >= self.nodes.len() {
            return Err(Error::Internal(format!("root {} not on tape", root.0)));
        }
        if upstream.dim() != self.nodes[root.0].value.dim() {
            return Err(Error::Internal(format!(
                "upstream gradient {:?} does not match root {:?}",
                upstream.dim(),
                self.nodes[root.0].value.dim()
            )));
        }
        let num_params = params.len();
        let mut grads: Vec<Option<Array2<f64>>> = (0..=root.0).map(|_| None).collect();
        grads[root.0] = Some(upstream);

        fn accumulate(grads: &mut [Option<Array2<f64>>], v: Var, g: Array2<f64>) {
            match &mut grads[v.0] {
                Some(existing) => *existing += &g,
                slot => *slot = Some(g),
            }
        }

        for idx in (0..=root.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            match &node.op {
                Op::Constant => {}
                Op::Param(i) => {
                    let p = params.get_mut(*i).ok_or_else(|| {
                        Error::Internal(format!("tape references parameter {i} of {num_params}"))
                    })?;
                    if p.value.dim() != g.dim() {
                        return Err(Error::Internal(format!(
                            "parameter {i} shape {:?} disagrees with tape {:?}",
                            p.value.dim(),
                            g.dim()
                        )));
                    }
                    if p.grad.dim() != g.dim() {
                        p.grad = Array2::zeros(g.raw_dim());
                    }
                    p.grad += &g;
                }
                Op::MatMul(a, b) => {
                    let ga = g.dot(&self.value(*b).t());
                    let gb = self.value(*a).t().dot(&g);
                    accumulate(&mut grads, *a, ga);
                    accumulate(&mut grads, *b, gb);
                }
                Op::AddBias(a, b) => {
                    let gb = g.sum_axis(Axis(0)).insert_axis(Axis(0));
                    accumulate(&mut grads, *b, gb);
                    accumulate(&mut grads, *a, g);
                }
                Op::Relu(a) => {
                    let mut ga = g;
                    Zip::from(&mut ga)
                        .and(self.value(*a))
                        .for_each(|gi, &x| *gi *= relu_grad(x));
                    accumulate(&mut grads, *a, ga);
                }
                Op::SparseAffine {
                    x,
                    matrix,
                    lap_coef,
                    id_coef,
                } => {
                    let mut gx = matrix.spmm_transpose(g.view())?;
                    if *id_coef == 0.0 {
                        gx.mapv_inplace(|v| lap_coef * v);
                    } else {
                        Zip::from(&mut gx)
                            .and(&g)
                            .for_each(|o, &gi| *o = lap_coef * *o + id_coef * gi);
                    }
                    accumulate(&mut grads, *x, gx);
                }
                Op::Scale(a, f) => accumulate(&mut grads, *a, g * *f),
                Op::Add(a, b) => {
                    accumulate(&mut grads, *b, g.clone());
                    accumulate(&mut grads, *a, g);
                }
                Op::Sum(parts) => {
                    for &p in parts {
                        accumulate(&mut grads, p, g.clone());
                    }
                }
                Op::Concat(parts) => {
                    let mut start = 0;
                    for &p in parts {
                        let w = self.value(p).ncols();
                        let slice = g.slice(ndarray::s![.., start..start + w]).to_owned();
                        accumulate(&mut grads, p, slice);
                        start += w;
                    }
                }
                Op::Custom(inputs, op) => {
                    let values: Vec<&Array2<f64>> = inputs.iter().map(|&v| self.value(v)).collect();
                    let input_grads = op.backward(&values, &node.value, &g)?;
                    if input_grads.len() != inputs.len() {
                        return Err(Error::Internal(format!(
                            "custom op returned {} gradients for {} inputs",
                            input_grads.len(),
                            inputs.len()
                        )));
                    }
                    for (&v, gv) in inputs.iter().zip(input_grads) {
                        if gv.dim() != self.value(v).dim() {
                            return Err(Error::Internal("custom op gradient shape".into()));
                        }
                        accumulate(&mut grads, v, gv);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Runs filter plans on the tape so plan evaluation stays differentiable.
pub struct TapeBackend<'t, 'g> {
    pub tape: &'t mut Tape<'g>,
    pub laplacian: &'g SparseMatrix,
}

impl PlanBackend for TapeBackend<'_, '_> {
    type Value = Var;

    fn propagate(&mut self, x: &Var, lap_coef: f64, id_coef: f64) -> Result<Var> {
        self.tape.sparse_affine(self.laplacian, *x, lap_coef, id_coef)
    }

    fn scale(&mut self, x: &Var, factor: f64) -> Result<Var> {
        Ok(self.tape.scale(*x, factor))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub weight_decay: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            weight_decay: 0.0,
        }
    }
}

/// Adam with bias correction. Weight decay is added to the gradient.
#[derive(Debug, Clone)]
pub struct Adam {
    pub config: AdamConfig,
    step: u64,
    first: Vec<Array2<f64>>,
    second: Vec<Array2<f64>>,
}

impl Adam {
    pub fn new(config: AdamConfig, params: &[ParamTensor]) -> Self {
        Adam {
            config,
            step: 0,
            first: params.iter().map(|p| Array2::zeros(p.value.raw_dim())).collect(),
            second: params.iter().map(|p| Array2::zeros(p.value.raw_dim())).collect(),
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, params: &mut [ParamTensor]) -> Result<()> {
        if params.len() != self.first.len() {
            return Err(Error::Internal(format!(
                "optimizer tracks {} tensors, got {}",
                self.first.len(),
                params.len()
            )));
        }
        self.step += 1;
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
            weight_decay,
        } = self.config;
        let bc1 = 1.0 - beta1.powi(self.step as i32);
        let bc2 = 1.0 - beta2.powi(self.step as i32);
        for ((p, m), v) in params.iter_mut().zip(&mut self.first).zip(&mut self.second) {
            if p.value.dim() != m.dim() || p.grad.dim() != m.dim() {
                return Err(Error::Internal("optimizer moment shape mismatch".into()));
            }
            Zip::from(&mut p.value)
                .and(&p.grad)
                .and(m)
                .and(v)
                .for_each(|w, &g, m, v| {
                    let g = g + weight_decay * *w;
                    *m = beta1 * *m + (1.0 - beta1) * g;
                    *v = beta2 * *v + (1.0 - beta2) * g * g;
                    let m_hat = *m / bc1;
                    let v_hat = *v / bc2;
                    *w -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
                });
        }
        Ok(())
    }
}

/// Smallest gradient magnitude used as the relative-error denominator, so
/// coordinates with vanishing gradients are compared on an absolute scale.
pub const GRAD_CHECK_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub max_rel_err: f64,
    pub coords_checked: usize,
}

/// Compares the analytic gradients already stored in `params[..].grad` with
/// central differences of `loss` on a seeded random subsample of coordinates.
///
/// The relative error of a coordinate is `|a - n| / max(|a|, |n|, GRAD_CHECK_FLOOR)`.
pub fn grad_check<F>(
    params: &mut [ParamTensor],
    mut loss: F,
    epsilon: f64,
    max_coords: usize,
    seed: u64,
) -> GradCheck
where
    F: FnMut(&[ParamTensor]) -> f64,
{
    let total: usize = params.iter().map(ParamTensor::len).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords: Vec<usize> = if total <= max_coords {
        (0..total).collect()
    } else {
        sample(&mut rng, total, max_coords).into_vec()
    };
    coords.sort_unstable();

    let mut max_rel_err: f64 = 0.0;
    for &flat in &coords {
        let (mut t, mut off) = (0, flat);
        while off >= params[t].len() {
            off -= params[t].len();
            t += 1;
        }
        let cols = params[t].value.ncols();
        let (r, c) = (off / cols, off % cols);
        let analytic = params[t].grad[[r, c]];
        let orig = params[t].value[[r, c]];
        params[t].value[[r, c]] = orig + epsilon;
        let up = loss(params);
        params[t].value[[r, c]] = orig - epsilon;
        let down = loss(params);
        params[t].value[[r, c]] = orig;
        let numeric = (up - down) / (2.0 * epsilon);
        let denom = analytic.abs().max(numeric.abs()).max(GRAD_CHECK_FLOOR);
        max_rel_err = max_rel_err.max((analytic - numeric).abs() / denom);
    }
    GradCheck {
        max_rel_err,
        coords_checked: coords.len(),
    }
}
