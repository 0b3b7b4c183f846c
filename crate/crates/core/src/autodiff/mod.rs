//! Reverse-mode automatic differentiation over dense 2-D tensors.
//!
//! A [`Graph`] is an append-only tape. Every operation pushes a node holding
//! its forward value and the handles of its inputs, so node order is already
//! a topological order and [`Graph::backward`] walks it in reverse, visiting
//! each node once.
//!
//! ```
//! use geomgan::autodiff::{Graph, Tensor};
//!
//! let mut g = Graph::new();
//! let w = g.param(Tensor::from_vec(1, 2, vec![1.0, -2.0]).unwrap());
//! let loss = g.sum(w);
//! g.backward(loss).unwrap();
//! assert_eq!(g.grad(w).unwrap().data(), &[1.0, 1.0]);
//! ```

mod tensor;

pub use tensor::Tensor;
pub(crate) use tensor::gemm;

use crate::error::{GeomError, Result};

/// Handle to a node in a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

#[derive(Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Scale(Var, f64),
    Mul(Var, Var),
    AddRow(Var, Var),
    LeakyRelu(Var, f64),
    Tanh(Var),
    Sigmoid(Var),
    Sum(Var),
    Mean(Var),
    /// Weights already divided by their total.
    WeightedMean(Var, Vec<f64>),
    Mse(Var, Var),
    L1(Var, Var),
    BceLogits { logits: Var, targets: Vec<f64>, weights: Vec<f64> },
    PairwiseDistances(Var),
}

#[derive(Debug)]
struct Node {
    value: Tensor,
    grad: Option<Tensor>,
    op: Op,
    requires_grad: bool,
}

/// Computation graph. Single-threaded; build one per training step.
#[derive(Debug, Default)]
pub struct Graph {
    nodes: Vec<Node>,
}

fn check_same(op: &'static str, a: &Tensor, b: &Tensor) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(GeomError::Dimension { op, left: a.shape(), right: b.shape() });
    }
    Ok(())
}

/// Validates and normalizes a weight vector so it sums to one.
fn normalize_weights(weights: &[f64], n: usize) -> Result<Vec<f64>> {
    if weights.len() != n {
        return Err(GeomError::Dimension { op: "weights", left: (n, 1), right: (weights.len(), 1) });
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(GeomError::DegenerateWeights(format!("weight {w} is negative or non-finite")));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(GeomError::DegenerateWeights("all weights are zero".into()));
    }
    Ok(weights.iter().map(|w| w / total).collect())
}

/// Number of unordered pairs among `n` rows.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Euclidean distances between all unordered row pairs `(i, j)`, `i < j`,
/// in row-major pair order. Returned as a column.
pub fn pairwise_distances(x: &Tensor) -> Tensor {
    let n = x.rows();
    let mut out = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        let xi = x.row(i);
        for j in i + 1..n {
            let d2: f64 = xi.iter().zip(x.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            out.push(d2.sqrt());
        }
    }
    Tensor::column(&out)
}

fn leaky(v: f64, leak: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        leak * v
    }
}

pub(crate) fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

/// `max(l, 0) - l t + ln(1 + e^{-|l|})`
fn bce_logit_term(l: f64, t: f64) -> f64 {
    l.max(0.0) - l * t + (-l.abs()).exp().ln_1p()
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op, requires_grad: bool) -> Var {
        self.nodes.push(Node { value, grad: None, op, requires_grad });
        Var(self.nodes.len() - 1)
    }

    fn needs(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    /// Trainable leaf.
    pub fn param(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, true)
    }

    /// Leaf that receives no gradient.
    pub fn constant(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, false)
    }

    pub fn leaf(&mut self, value: Tensor, requires_grad: bool) -> Var {
        self.push(value, Op::Leaf, requires_grad)
    }

    /// Copy of `v`'s value as a constant; gradients stop here.
    pub fn detach(&mut self, v: Var) -> Var {
        let value = self.nodes[v.0].value.clone();
        self.constant(value)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn requires_grad(&self, v: Var) -> bool {
        self.needs(v)
    }

    /// Accumulated gradient, if any backward pass reached `v`.
    pub fn grad(&self, v: Var) -> Option<&Tensor> {
        self.nodes[v.0].grad.as_ref()
    }

    /// Gradient of `v`, zeros when no backward pass reached it.
    pub fn grad_or_zeros(&self, v: Var) -> Tensor {
        self.grad(v).cloned().unwrap_or_else(|| {
            let (r, c) = self.value(v).shape();
            Tensor::zeros(r, c)
        })
    }

    pub fn zero_grad(&mut self) {
        for n in &mut self.nodes {
            n.grad = None;
        }
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (va, vb) = (self.value(a), self.value(b));
        if va.cols() != vb.rows() {
            return Err(GeomError::Dimension { op: "matmul", left: va.shape(), right: vb.shape() });
        }
        let out = gemm(va, false, vb, false);
        let rg = self.needs(a) || self.needs(b);
        Ok(self.push(out, Op::MatMul(a, b), rg))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        check_same("add", self.value(a), self.value(b))?;
        let out = self.value(a).zip_map(self.value(b), |x, y| x + y);
        let rg = self.needs(a) || self.needs(b);
        Ok(self.push(out, Op::Add(a, b), rg))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        check_same("sub", self.value(a), self.value(b))?;
        let out = self.value(a).zip_map(self.value(b), |x, y| x - y);
        let rg = self.needs(a) || self.needs(b);
        Ok(self.push(out, Op::Sub(a, b), rg))
    }

    pub fn scalar_mul(&mut self, a: Var, s: f64) -> Var {
        let out = self.value(a).scale(s);
        let rg = self.needs(a);
        self.push(out, Op::Scale(a, s), rg)
    }

    pub fn elementwise_mul(&mut self, a: Var, b: Var) -> Result<Var> {
        check_same("elementwise_mul", self.value(a), self.value(b))?;
        let out = self.value(a).zip_map(self.value(b), |x, y| x * y);
        let rg = self.needs(a) || self.needs(b);
        Ok(self.push(out, Op::Mul(a, b), rg))
    }

    /// `a + 1·bias`, bias a 1 × cols row vector.
    pub fn broadcast_add_rowvec(&mut self, a: Var, bias: Var) -> Result<Var> {
        let (va, vb) = (self.value(a), self.value(bias));
        if vb.rows() != 1 || vb.cols() != va.cols() {
            return Err(GeomError::Dimension { op: "broadcast_add_rowvec", left: va.shape(), right: vb.shape() });
        }
        let mut out = va.clone();
        let cols = va.cols();
        if cols > 0 {
            for row in out.data_mut().chunks_exact_mut(cols) {
                for (x, b) in row.iter_mut().zip(vb.data()) {
                    *x += b;
                }
            }
        }
        let rg = self.needs(a) || self.needs(bias);
        Ok(self.push(out, Op::AddRow(a, bias), rg))
    }

    pub fn leaky_relu(&mut self, x: Var, leak: f64) -> Result<Var> {
        if !(0.0..1.0).contains(&leak) {
            return Err(GeomError::Config(format!("leak {leak} outside [0, 1)")));
        }
        let out = self.value(x).map(|v| leaky(v, leak));
        let rg = self.needs(x);
        Ok(self.push(out, Op::LeakyRelu(x, leak), rg))
    }

    pub fn relu(&mut self, x: Var) -> Var {
        let out = self.value(x).map(|v| v.max(0.0));
        let rg = self.needs(x);
        self.push(out, Op::LeakyRelu(x, 0.0), rg)
    }

    pub fn tanh(&mut self, x: Var) -> Var {
        let out = self.value(x).map(f64::tanh);
        let rg = self.needs(x);
        self.push(out, Op::Tanh(x), rg)
    }

    pub fn sigmoid(&mut self, x: Var) -> Var {
        let out = self.value(x).map(sigmoid);
        let rg = self.needs(x);
        self.push(out, Op::Sigmoid(x), rg)
    }

    pub fn sum(&mut self, x: Var) -> Var {
        let out = Tensor::scalar(self.value(x).sum());
        let rg = self.needs(x);
        self.push(out, Op::Sum(x), rg)
    }

    pub fn reduce_mean(&mut self, x: Var) -> Result<Var> {
        if self.value(x).is_empty() {
            return Err(GeomError::Contract("mean of an empty tensor".into()));
        }
        let out = Tensor::scalar(self.value(x).mean());
        let rg = self.needs(x);
        Ok(self.push(out, Op::Mean(x), rg))
    }

    /// `Σ w_i x_i / Σ w_i` over all entries of `x`.
    pub fn weighted_mean(&mut self, x: Var, weights: &[f64]) -> Result<Var> {
        let w = normalize_weights(weights, self.value(x).len())?;
        let out = Tensor::scalar(self.value(x).data().iter().zip(&w).map(|(a, b)| a * b).sum());
        let rg = self.needs(x);
        Ok(self.push(out, Op::WeightedMean(x, w), rg))
    }

    /// Mean squared difference over all entries.
    pub fn mse(&mut self, a: Var, b: Var) -> Result<Var> {
        check_same("mse", self.value(a), self.value(b))?;
        let (va, vb) = (self.value(a), self.value(b));
        let n = va.len().max(1) as f64;
        let s: f64 = va.data().iter().zip(vb.data()).map(|(x, y)| (x - y) * (x - y)).sum();
        let rg = self.needs(a) || self.needs(b);
        Ok(self.push(Tensor::scalar(s / n), Op::Mse(a, b), rg))
    }

    /// Mean absolute difference over all entries.
    pub fn l1(&mut self, a: Var, b: Var) -> Result<Var> {
        check_same("l1", self.value(a), self.value(b))?;
        let (va, vb) = (self.value(a), self.value(b));
        let n = va.len().max(1) as f64;
        let s: f64 = va.data().iter().zip(vb.data()).map(|(x, y)| (x - y).abs()).sum();
        let rg = self.needs(a) || self.needs(b);
        Ok(self.push(Tensor::scalar(s / n), Op::L1(a, b), rg))
    }

    /// Weighted binary cross-entropy on logits, normalized by the weight total.
    pub fn bce_with_logits(&mut self, logits: Var, targets: &[f64], weights: &[f64]) -> Result<Var> {
        let n = self.value(logits).len();
        if targets.len() != n {
            return Err(GeomError::Dimension { op: "bce_with_logits", left: (n, 1), right: (targets.len(), 1) });
        }
        if let Some(t) = targets.iter().find(|t| **t != 0.0 && **t != 1.0) {
            return Err(GeomError::Contract(format!("bce target {t} not in {{0, 1}}")));
        }
        let w = normalize_weights(weights, n)?;
        let loss: f64 = self
            .value(logits)
            .data()
            .iter()
            .zip(targets)
            .zip(&w)
            .map(|((&l, &t), &wi)| wi * bce_logit_term(l, t))
            .sum();
        let rg = self.needs(logits);
        Ok(self.push(
            Tensor::scalar(loss),
            Op::BceLogits { logits, targets: targets.to_vec(), weights: w },
            rg,
        ))
    }

    /// Column of Euclidean distances between all unordered row pairs.
    pub fn pairwise_distances(&mut self, x: Var) -> Var {
        let out = pairwise_distances(self.value(x));
        let rg = self.needs(x);
        self.push(out, Op::PairwiseDistances(x), rg)
    }

    /// Propagates `d loss / d node` to every node that requires a gradient,
    /// adding into any gradient already stored (call [`Graph::zero_grad`] to reset).
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        let shape = self.value(loss).shape();
        if shape != (1, 1) {
            return Err(GeomError::Contract(format!("backward needs a 1x1 loss, got {shape:?}")));
        }
        let mut grads: Vec<Option<Tensor>> = (0..=loss.0).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::scalar(1.0));

        for idx in (0..=loss.0).rev() {
            if !self.nodes[idx].requires_grad {
                continue;
            }
            let Some(up) = grads[idx].take() else { continue };
            self.propagate(idx, &up, &mut grads);
            let node = &mut self.nodes[idx];
            match &mut node.grad {
                Some(g) => g.add_assign(&up),
                None => node.grad = Some(up),
            }
        }
        Ok(())
    }

    fn propagate(&self, idx: usize, up: &Tensor, grads: &mut [Option<Tensor>]) {
        let node = &self.nodes[idx];
        let mut send = |v: Var, g: Tensor| {
            if !self.nodes[v.0].requires_grad {
                return;
            }
            match &mut grads[v.0] {
                Some(acc) => acc.add_assign(&g),
                slot @ None => *slot = Some(g),
            }
        };
        match &node.op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                if self.needs(*a) {
                    send(*a, gemm(up, false, self.value(*b), true));
                }
                if self.needs(*b) {
                    send(*b, gemm(self.value(*a), true, up, false));
                }
            }
            Op::Add(a, b) => {
                send(*a, up.clone());
                send(*b, up.clone());
            }
            Op::Sub(a, b) => {
                send(*a, up.clone());
                send(*b, up.scale(-1.0));
            }
            Op::Scale(a, s) => send(*a, up.scale(*s)),
            Op::Mul(a, b) => {
                if self.needs(*a) {
                    send(*a, up.zip_map(self.value(*b), |g, y| g * y));
                }
                if self.needs(*b) {
                    send(*b, up.zip_map(self.value(*a), |g, x| g * x));
                }
            }
            Op::AddRow(a, bias) => {
                send(*a, up.clone());
                if self.needs(*bias) {
                    let cols = up.cols();
                    let mut gb = Tensor::zeros(1, cols);
                    for row in up.iter_rows() {
                        for (acc, g) in gb.data_mut().iter_mut().zip(row) {
                            *acc += g;
                        }
                    }
                    send(*bias, gb);
                }
            }
            Op::LeakyRelu(x, leak) => {
                let leak = *leak;
                send(*x, up.zip_map(self.value(*x), |g, v| if v > 0.0 { g } else { g * leak }));
            }
            Op::Tanh(x) => send(*x, up.zip_map(&node.value, |g, y| g * (1.0 - y * y))),
            Op::Sigmoid(x) => send(*x, up.zip_map(&node.value, |g, y| g * y * (1.0 - y))),
            Op::Sum(x) => {
                let (r, c) = self.value(*x).shape();
                send(*x, Tensor::full(r, c, up.item()));
            }
            Op::Mean(x) => {
                let (r, c) = self.value(*x).shape();
                send(*x, Tensor::full(r, c, up.item() / (r * c) as f64));
            }
            Op::WeightedMean(x, w) => {
                let (r, c) = self.value(*x).shape();
                let g = up.item();
                send(*x, Tensor::from_vec(r, c, w.iter().map(|wi| wi * g).collect()).expect("shape"));
            }
            Op::Mse(a, b) => {
                let (va, vb) = (self.value(*a), self.value(*b));
                let k = 2.0 * up.item() / va.len().max(1) as f64;
                let diff = va.zip_map(vb, |x, y| k * (x - y));
                if self.needs(*b) {
                    send(*b, diff.scale(-1.0));
                }
                send(*a, diff);
            }
            Op::L1(a, b) => {
                let (va, vb) = (self.value(*a), self.value(*b));
                let k = up.item() / va.len().max(1) as f64;
                let sign = va.zip_map(vb, |x, y| {
                    let d = x - y;
                    if d > 0.0 {
                        k
                    } else if d < 0.0 {
                        -k
                    } else {
                        0.0
                    }
                });
                if self.needs(*b) {
                    send(*b, sign.scale(-1.0));
                }
                send(*a, sign);
            }
            Op::BceLogits { logits, targets, weights } => {
                let vl = self.value(*logits);
                let g = up.item();
                let data = vl
                    .data()
                    .iter()
                    .zip(targets)
                    .zip(weights)
                    .map(|((&l, &t), &w)| g * w * (sigmoid(l) - t))
                    .collect();
                send(*logits, Tensor::from_vec(vl.rows(), vl.cols(), data).expect("shape"));
            }
            Op::PairwiseDistances(x) => {
                let vx = self.value(*x);
                let (n, d) = vx.shape();
                let mut gx = Tensor::zeros(n, d);
                let mut p = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        let dist = node.value.data()[p];
                        let gp = up.data()[p];
                        p += 1;
                        // Coincident points: zero subgradient.
                        if dist == 0.0 || gp == 0.0 {
                            continue;
                        }
                        let k = gp / dist;
                        for c in 0..d {
                            let delta = k * (vx.get(i, c) - vx.get(j, c));
                            gx.data_mut()[i * d + c] += delta;
                            gx.data_mut()[j * d + c] -= delta;
                        }
                    }
                }
                send(*x, gx);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(rows: usize, cols: usize, data: &[f64]) -> Tensor {
        Tensor::from_vec(rows, cols, data.to_vec()).unwrap()
    }

    #[test]
    fn matmul_by_identity() {
        let mut g = Graph::new();
        let a = g.constant(t(2, 2, &[1., 2., 3., 4.]));
        let i = g.constant(Tensor::identity(2));
        let c = g.matmul(a, i).unwrap();
        assert_eq!(g.value(c).data(), &[1., 2., 3., 4.]);
    }

    #[test]
    fn matmul_shape_error_names_both_shapes() {
        let mut g = Graph::new();
        let a = g.constant(Tensor::zeros(2, 3));
        let b = g.constant(Tensor::zeros(2, 3));
        let err = g.matmul(a, b).unwrap_err().to_string();
        assert!(err.contains("(2, 3)"), "{err}");
        let bias = g.constant(Tensor::zeros(2, 3));
        assert!(g.broadcast_add_rowvec(a, bias).is_err());
    }

    #[test]
    fn add_zeros_and_sum_gradient() {
        let mut g = Graph::new();
        let x = g.param(t(2, 2, &[1., -2., 3., 0.5]));
        let z = g.param(Tensor::zeros(2, 2));
        let y = g.add(x, z).unwrap();
        assert_eq!(g.value(y), g.value(x));
        let s = g.sum(y);
        g.backward(s).unwrap();
        assert_eq!(g.grad(x).unwrap(), &Tensor::ones(2, 2));
    }

    #[test]
    fn activation_values() {
        let mut g = Graph::new();
        let x = g.constant(t(1, 1, &[-1.0]));
        let y = g.leaky_relu(x, 0.2).unwrap();
        assert!((g.value(y).item() + 0.2).abs() < 1e-15);
        let zero = g.constant(Tensor::zeros(1, 1));
        let s = g.sigmoid(zero);
        let th = g.tanh(zero);
        assert_eq!(g.value(s).item(), 0.5);
        assert_eq!(g.value(th).item(), 0.0);
        assert!(g.leaky_relu(x, 1.0).is_err());
    }

    #[test]
    fn leaky_kink_uses_leak_slope() {
        let mut g = Graph::new();
        let x = g.param(Tensor::zeros(1, 1));
        let y = g.leaky_relu(x, 0.2).unwrap();
        let s = g.sum(y);
        g.backward(s).unwrap();
        assert_eq!(g.grad(x).unwrap().item(), 0.2);
    }

    #[test]
    fn weighted_mean_values_and_errors() {
        let mut g = Graph::new();
        let x = g.constant(Tensor::column(&[2.0, 4.0]));
        let m = g.weighted_mean(x, &[1.0, 1.0]).unwrap();
        assert_eq!(g.value(m).item(), 3.0);
        let m = g.weighted_mean(x, &[3.0, 1.0]).unwrap();
        assert_eq!(g.value(m).item(), 2.5);
        assert!(matches!(g.weighted_mean(x, &[0.0, 0.0]), Err(GeomError::DegenerateWeights(_))));
        assert!(matches!(g.weighted_mean(x, &[-1.0, 2.0]), Err(GeomError::DegenerateWeights(_))));
    }

    #[test]
    fn mse_of_identical_inputs_is_zero_with_zero_gradient() {
        let mut g = Graph::new();
        let x = g.param(t(2, 2, &[1., 2., 3., 4.]));
        let l = g.mse(x, x).unwrap();
        g.backward(l).unwrap();
        assert_eq!(g.value(l).item(), 0.0);
        assert!(g.grad(x).unwrap().data().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn backward_rejects_non_scalar() {
        let mut g = Graph::new();
        let x = g.param(Tensor::zeros(2, 1));
        assert!(matches!(g.backward(x), Err(GeomError::Contract(_))));
    }

    #[test]
    fn detached_input_gets_no_gradient() {
        let mut g = Graph::new();
        let w = g.param(t(1, 1, &[2.0]));
        let x = g.constant(t(1, 1, &[3.0]));
        let y = g.elementwise_mul(w, x).unwrap();
        let d = g.detach(y);
        let z = g.elementwise_mul(d, w).unwrap();
        g.backward(z).unwrap();
        assert!(g.grad(x).is_none());
        // only the direct path through w counts: dz/dw = d = 6
        assert_eq!(g.grad(w).unwrap().item(), 6.0);
    }

    #[test]
    fn reused_node_accumulates_both_paths() {
        // f = x*x + x*y, df/dx = 2x + y, df/dy = x
        let mut g = Graph::new();
        let x = g.param(t(1, 1, &[1.5]));
        let y = g.param(t(1, 1, &[-0.7]));
        let xx = g.elementwise_mul(x, x).unwrap();
        let xy = g.elementwise_mul(x, y).unwrap();
        let f = g.add(xx, xy).unwrap();
        g.backward(f).unwrap();
        assert!((g.grad(x).unwrap().item() - (2.0 * 1.5 - 0.7)).abs() < 1e-15);
        assert!((g.grad(y).unwrap().item() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn repeated_backward_accumulates() {
        let mut g = Graph::new();
        let w = g.param(t(1, 2, &[1.0, 2.0]));
        let s = g.sum(w);
        g.backward(s).unwrap();
        g.backward(s).unwrap();
        assert_eq!(g.grad(w).unwrap().data(), &[2.0, 2.0]);
        g.zero_grad();
        assert!(g.grad(w).is_none());
    }

    #[test]
    fn pairwise_distance_coincident_points_have_zero_gradient() {
        let mut g = Graph::new();
        let x = g.param(t(2, 2, &[1.0, 1.0, 1.0, 1.0]));
        let d = g.pairwise_distances(x);
        let s = g.sum(d);
        g.backward(s).unwrap();
        assert_eq!(g.value(d).item(), 0.0);
        assert!(g.grad(x).unwrap().is_finite());
    }

    #[test]
    fn bce_rejects_soft_targets() {
        let mut g = Graph::new();
        let l = g.constant(Tensor::zeros(2, 1));
        assert!(g.bce_with_logits(l, &[0.5, 1.0], &[1.0, 1.0]).is_err());
        let v = g.bce_with_logits(l, &[0.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!((g.value(v).item() - std::f64::consts::LN_2).abs() < 1e-15);
    }
}
