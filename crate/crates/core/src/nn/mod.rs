//! Dense MLPs on top of [`crate::autodiff`], with Adam/SGD and a small
//! binary model format.

mod io;
mod optim;

pub use io::{load_model, read_mlp, save_model, write_mlp, MODEL_MAGIC, MODEL_VERSION};
pub use optim::{Optimizer, OptimizerKind};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{gemm, Graph, Tensor, Var};
use crate::error::{GeomError, Result};
use crate::rng::seeded;

pub const LEAK: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Linear,
    LeakyRelu,
    Relu,
    Tanh,
    Sigmoid,
}

impl Activation {
    pub fn code(self) -> u8 {
        match self {
            Activation::Linear => 0,
            Activation::LeakyRelu => 1,
            Activation::Relu => 2,
            Activation::Tanh => 3,
            Activation::Sigmoid => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => Activation::Linear,
            1 => Activation::LeakyRelu,
            2 => Activation::Relu,
            3 => Activation::Tanh,
            4 => Activation::Sigmoid,
            _ => return None,
        })
    }

    fn apply_graph(self, g: &mut Graph, x: Var) -> Result<Var> {
        Ok(match self {
            Activation::Linear => x,
            Activation::LeakyRelu => g.leaky_relu(x, LEAK)?,
            Activation::Relu => g.relu(x),
            Activation::Tanh => g.tanh(x),
            Activation::Sigmoid => g.sigmoid(x),
        })
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Linear => v,
            Activation::LeakyRelu => {
                if v > 0.0 {
                    v
                } else {
                    LEAK * v
                }
            }
            Activation::Relu => v.max(0.0),
            Activation::Tanh => v.tanh(),
            Activation::Sigmoid => crate::autodiff::sigmoid(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weight: Tensor,
    pub bias: Tensor,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn in_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.cols()
    }
}

/// Feed-forward stack of dense layers, optionally with the input added to
/// the output (only when input and output widths agree).
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<DenseLayer>,
    residual: bool,
}

/// An [`Mlp`]'s parameters inserted into one [`Graph`]. Reuse the same
/// binding for every forward pass in that graph so gradients from all uses
/// land on the same leaves.
#[derive(Debug, Clone)]
pub struct BoundMlp {
    params: Vec<(Var, Var)>,
    activations: Vec<Activation>,
    residual: bool,
}

impl BoundMlp {
    pub fn forward(&self, g: &mut Graph, x: Var) -> Result<Var> {
        let mut h = x;
        for (&(w, b), &act) in self.params.iter().zip(&self.activations) {
            let z = g.matmul(h, w)?;
            let z = g.broadcast_add_rowvec(z, b)?;
            h = act.apply_graph(g, z)?;
        }
        if self.residual {
            h = g.add(h, x)?;
        }
        Ok(h)
    }

    /// Gradients in [`Mlp::params_mut`] order; zeros for untouched leaves.
    pub fn grads(&self, g: &Graph) -> Vec<Tensor> {
        self.params
            .iter()
            .flat_map(|&(w, b)| [g.grad_or_zeros(w), g.grad_or_zeros(b)])
            .collect()
    }
}

/// Glorot-uniform initialized MLP with zero biases.
///
/// `dims` lists layer widths from input to output; `activations` has one
/// entry per layer (`dims.len() - 1`).
pub fn init_mlp(dims: &[usize], activations: &[Activation], seed: u64) -> Result<Mlp> {
    if dims.len() < 2 {
        return Err(GeomError::Config(format!("mlp needs at least 2 dims, got {dims:?}")));
    }
    if activations.len() != dims.len() - 1 {
        return Err(GeomError::Config(format!(
            "{} activations for {} layers",
            activations.len(),
            dims.len() - 1
        )));
    }
    if dims.contains(&0) {
        return Err(GeomError::Config(format!("zero-width layer in {dims:?}")));
    }
    let mut rng = seeded(seed);
    let layers = dims
        .windows(2)
        .zip(activations)
        .map(|(w, &activation)| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let data = (0..fan_in * fan_out).map(|_| rng.random_range(-bound..bound)).collect();
            DenseLayer {
                weight: Tensor::from_vec(fan_in, fan_out, data).expect("sized"),
                bias: Tensor::zeros(1, fan_out),
                activation,
            }
        })
        .collect();
    Ok(Mlp { layers, residual: false })
}

/// Hidden layers leaky ReLU, last layer `out`.
pub fn leaky_activations(n_layers: usize, out: Activation) -> Vec<Activation> {
    let mut acts = vec![Activation::LeakyRelu; n_layers];
    if let Some(last) = acts.last_mut() {
        *last = out;
    }
    acts
}

impl Mlp {
    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(GeomError::Config("mlp without layers".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.bias.shape() != (1, l.out_dim()) {
                return Err(GeomError::Dimension { op: "layer bias", left: l.weight.shape(), right: l.bias.shape() });
            }
            if i > 0 && layers[i - 1].out_dim() != l.in_dim() {
                return Err(GeomError::Dimension {
                    op: "layer chain",
                    left: layers[i - 1].weight.shape(),
                    right: l.weight.shape(),
                });
            }
        }
        Ok(Self { layers, residual: false })
    }

    pub fn with_residual(mut self, residual: bool) -> Result<Self> {
        if residual && self.input_dim() != self.output_dim() {
            return Err(GeomError::Config(format!(
                "residual connection needs equal widths, got {} -> {}",
                self.input_dim(),
                self.output_dim()
            )));
        }
        self.residual = residual;
        Ok(self)
    }

    pub fn is_residual(&self) -> bool {
        self.residual
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim()).chain(self.layers.iter().map(DenseLayer::out_dim)).collect()
    }

    /// Weight, bias, weight, bias, ... from the first layer.
    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        self.layers.iter_mut().flat_map(|l| [&mut l.weight, &mut l.bias]).collect()
    }

    pub fn params(&self) -> Vec<&Tensor> {
        self.layers.iter().flat_map(|l| [&l.weight, &l.bias]).collect()
    }

    pub fn param_name(index: usize) -> String {
        let kind = if index % 2 == 0 { "weight" } else { "bias" };
        format!("layer {} {kind}", index / 2)
    }

    /// Inserts the parameters into `g`, trainable or frozen.
    pub fn bind(&self, g: &mut Graph, trainable: bool) -> BoundMlp {
        BoundMlp {
            params: self
                .layers
                .iter()
                .map(|l| (g.leaf(l.weight.clone(), trainable), g.leaf(l.bias.clone(), trainable)))
                .collect(),
            activations: self.layers.iter().map(|l| l.activation).collect(),
            residual: self.residual,
        }
    }

    /// One-off graph forward with trainable parameters.
    pub fn forward(&self, g: &mut Graph, x: Var) -> Result<(Var, BoundMlp)> {
        let bound = self.bind(g, true);
        let y = bound.forward(g, x)?;
        Ok((y, bound))
    }

    /// Forward pass outside any graph.
    pub fn predict(&self, x: &Tensor) -> Result<Tensor> {
        if x.cols() != self.input_dim() {
            return Err(GeomError::Dimension { op: "mlp input", left: x.shape(), right: self.layers[0].weight.shape() });
        }
        let mut h = x.clone();
        for l in &self.layers {
            let mut z = gemm(&h, false, &l.weight, false);
            let cols = z.cols();
            for row in z.data_mut().chunks_exact_mut(cols) {
                for (v, b) in row.iter_mut().zip(l.bias.data()) {
                    *v = l.activation.apply(*v + b);
                }
            }
            h = z;
        }
        if self.residual {
            h.add_assign(x);
        }
        Ok(h)
    }

    pub fn param_bytes(&self) -> Vec<u8> {
        self.params().iter().flat_map(|t| t.to_le_bytes()).collect()
    }

    pub fn param_count(&self) -> usize {
        self.params().iter().map(|t| t.len()).sum()
    }
}

/// Shuffled index batches covering `0..n` exactly once; the last batch may be short.
pub fn minibatches<R: Rng + ?Sized>(n: usize, batch: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx.chunks(batch.max(1)).map(<[usize]>::to_vec).collect()
}
