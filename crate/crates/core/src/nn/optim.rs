use serde::{Deserialize, Serialize};

use super::Mlp;
use crate::autodiff::Tensor;
use crate::error::{GeomError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    #[default]
    Adam,
    Sgd,
}

/// Adam (with bias correction) or plain SGD over a fixed parameter list.
/// Moment buffers are created on the first step.
#[derive(Debug, Clone)]
pub struct Optimizer {
    pub kind: OptimizerKind,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    steps: u64,
    first: Vec<Tensor>,
    second: Vec<Tensor>,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: f64) -> Self {
        Self {
            kind,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            steps: 0,
            first: Vec::new(),
            second: Vec::new(),
        }
    }

    pub fn adam(learning_rate: f64) -> Self {
        Self::new(OptimizerKind::Adam, learning_rate)
    }

    pub fn sgd(learning_rate: f64) -> Self {
        Self::new(OptimizerKind::Sgd, learning_rate)
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Applies one update and zeroes `grads`. Nothing is modified when any
    /// gradient is non-finite; the error names the offending parameter.
    pub fn step(
        &mut self,
        params: &mut [&mut Tensor],
        grads: &mut [Tensor],
        name: impl Fn(usize) -> String,
    ) -> Result<()> {
        if params.len() != grads.len() {
            return Err(GeomError::Contract(format!("{} params but {} grads", params.len(), grads.len())));
        }
        for (i, (p, g)) in params.iter().zip(grads.iter()).enumerate() {
            if p.shape() != g.shape() {
                return Err(GeomError::Dimension { op: "optimizer step", left: p.shape(), right: g.shape() });
            }
            if !g.is_finite() {
                return Err(GeomError::Divergence {
                    what: format!("non-finite gradient for {}", name(i)),
                    epoch: 0,
                });
            }
        }
        if self.first.is_empty() {
            self.first = params.iter().map(|p| Tensor::zeros(p.rows(), p.cols())).collect();
            self.second = self.first.clone();
        } else if self.first.len() != params.len() {
            return Err(GeomError::Contract("parameter list changed between steps".into()));
        }
        self.steps += 1;
        let lr = self.learning_rate;
        match self.kind {
            OptimizerKind::Sgd => {
                for (p, g) in params.iter_mut().zip(grads.iter()) {
                    for (w, d) in p.data_mut().iter_mut().zip(g.data()) {
                        *w -= lr * d;
                    }
                }
            }
            OptimizerKind::Adam => {
                let (b1, b2, eps) = (self.beta1, self.beta2, self.epsilon);
                let c1 = 1.0 - b1.powi(self.steps as i32);
                let c2 = 1.0 - b2.powi(self.steps as i32);
                for ((p, g), (m, v)) in params
                    .iter_mut()
                    .zip(grads.iter())
                    .zip(self.first.iter_mut().zip(self.second.iter_mut()))
                {
                    let it = p.data_mut().iter_mut().zip(g.data()).zip(m.data_mut().iter_mut().zip(v.data_mut()));
                    for ((w, &d), (mi, vi)) in it {
                        *mi = b1 * *mi + (1.0 - b1) * d;
                        *vi = b2 * *vi + (1.0 - b2) * d * d;
                        let m_hat = *mi / c1;
                        let v_hat = *vi / c2;
                        *w -= lr * m_hat / (v_hat.sqrt() + eps);
                    }
                }
            }
        }
        for g in grads.iter_mut() {
            g.data_mut().iter_mut().for_each(|d| *d = 0.0);
        }
        Ok(())
    }

    pub fn step_mlp(&mut self, mlp: &mut Mlp, grads: &mut [Tensor]) -> Result<()> {
        let mut params = mlp.params_mut();
        self.step(&mut params, grads, Mlp::param_name)
    }
}
