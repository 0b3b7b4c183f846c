use rand::Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::autodiff::Tensor;
use crate::error::{GeomError, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub mean: Vec<f64>,
    /// Per-dimension variances.
    pub cov_diag: Vec<f64>,
    pub frequency: f64,
}

/// Points on the segment between two component means, with Gaussian jitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub count: usize,
}

/// Diagonal Gaussian mixture with optional transition points.
///
/// `total_n` mixture rows are drawn with i.i.d. component choices; transition
/// rows are appended after them and labeled `components.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSpec {
    pub components: Vec<MixtureComponent>,
    #[serde(default)]
    pub transition_pairs: Vec<Transition>,
    #[serde(default = "default_jitter")]
    pub transition_jitter: f64,
    pub total_n: usize,
    pub seed: u64,
}

fn default_jitter() -> f64 {
    0.25
}

impl MixtureSpec {
    pub fn dim(&self) -> usize {
        self.components.first().map_or(0, |c| c.mean.len())
    }

    pub fn transition_label(&self) -> i64 {
        self.components.len() as i64
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(GeomError::Config("mixture without components".into()));
        }
        let d = self.dim();
        if d == 0 {
            return Err(GeomError::Config("zero-dimensional mixture".into()));
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.mean.len() != d || c.cov_diag.len() != d {
                return Err(GeomError::Config(format!("component {i} has inconsistent dimension")));
            }
            if c.cov_diag.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(GeomError::Config(format!("component {i} has a negative variance")));
            }
            if !(c.frequency.is_finite() && c.frequency >= 0.0) {
                return Err(GeomError::Config(format!("component {i} has invalid frequency")));
            }
        }
        let total: f64 = self.components.iter().map(|c| c.frequency).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(GeomError::Config(format!("frequencies sum to {total}, not 1")));
        }
        for t in &self.transition_pairs {
            if t.from >= self.components.len() || t.to >= self.components.len() {
                return Err(GeomError::Config(format!("transition {}->{} out of range", t.from, t.to)));
            }
        }
        if !(self.transition_jitter.is_finite() && self.transition_jitter >= 0.0) {
            return Err(GeomError::Config("transition jitter must be >= 0".into()));
        }
        Ok(())
    }
}

pub fn simulate_mixture(spec: &MixtureSpec) -> Result<Dataset> {
    spec.validate()?;
    let d = spec.dim();
    let mut rng = seeded(spec.seed);
    let picker = WeightedIndex::new(spec.components.iter().map(|c| c.frequency))
        .map_err(|e| GeomError::Config(format!("frequencies: {e}")))?;
    let n_trans: usize = spec.transition_pairs.iter().map(|t| t.count).sum();
    let mut data = Vec::with_capacity((spec.total_n + n_trans) * d);
    let mut labels = Vec::with_capacity(spec.total_n + n_trans);
    for _ in 0..spec.total_n {
        let k = picker.sample(&mut rng);
        let c = &spec.components[k];
        for (m, v) in c.mean.iter().zip(&c.cov_diag) {
            let z: f64 = StandardNormal.sample(&mut rng);
            data.push(m + v.sqrt() * z);
        }
        labels.push(k as i64);
    }
    for t in &spec.transition_pairs {
        let (a, b) = (&spec.components[t.from].mean, &spec.components[t.to].mean);
        for _ in 0..t.count {
            let s: f64 = rng.random();
            for (ma, mb) in a.iter().zip(b) {
                let z: f64 = StandardNormal.sample(&mut rng);
                data.push(ma + s * (mb - ma) + spec.transition_jitter * z);
            }
            labels.push(spec.transition_label());
        }
    }
    let rows = Tensor::from_vec(labels.len(), d, data)?;
    Dataset::new(rows, Some(labels), None, format!("mixture seed {}", spec.seed))
}
