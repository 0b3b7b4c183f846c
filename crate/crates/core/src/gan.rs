//! Single-domain geometry-matching GAN.
//!
//! Real samples are weighted by the inverse occupancy of their Voronoi
//! region, so the discriminator sees every region of the data manifold with
//! equal mass. With uniform weights this is a standard GAN.

use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::autodiff::{Graph, Tensor, Var};
use crate::data::Dataset;
use crate::error::{GeomError, Result};
use crate::manifold::ManifoldModel;
use crate::nn::{init_mlp, leaky_activations, minibatches, Activation, Mlp, Optimizer, OptimizerKind};
use crate::partition::Partition;
use crate::rng::{derive_seed, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Binary cross-entropy on discriminator logits.
    #[default]
    ClassicSigmoid,
    /// `E[D(fake)] - E[D(real)]` on sigmoid scores.
    ScoreDifference,
}

/// How real samples are weighted in the adversarial losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// `1 / n_region` from the domain partition.
    #[default]
    Importance,
    Uniform,
    /// i.i.d. uniform weights in (0, 1], drawn once per run.
    Random,
}

/// How generated samples are weighted when the weight mode is not uniform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FakeWeighting {
    /// Inverse region counts within each generated minibatch.
    #[default]
    Minibatch,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GanConfig {
    pub noise_dim: usize,
    pub generator_hidden: Vec<usize>,
    pub discriminator_hidden: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub disc_steps_per_gen_step: usize,
    pub loss_kind: LossKind,
    pub weight_mode: WeightMode,
    pub fake_weighting: FakeWeighting,
    /// Apply fake-sample weights in the generator loss too.
    pub weight_generator: bool,
    pub optimizer: OptimizerKind,
}

impl Default for GanConfig {
    fn default() -> Self {
        Self {
            noise_dim: 10,
            generator_hidden: vec![50, 100, 200],
            discriminator_hidden: vec![200, 100, 50],
            learning_rate: 0.001,
            batch_size: 200,
            disc_steps_per_gen_step: 1,
            loss_kind: LossKind::ClassicSigmoid,
            weight_mode: WeightMode::Importance,
            fake_weighting: FakeWeighting::Minibatch,
            weight_generator: true,
            optimizer: OptimizerKind::Adam,
        }
    }
}

impl GanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 2 {
            return Err(GeomError::Config("batch_size must be at least 2".into()));
        }
        if self.noise_dim == 0 || self.disc_steps_per_gen_step == 0 {
            return Err(GeomError::Config("noise_dim and disc_steps_per_gen_step must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(GeomError::Config(format!("learning_rate {} must be positive", self.learning_rate)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub generator_loss: f64,
    pub discriminator_loss: f64,
    /// Discriminator loss on the same batches with uniform weights.
    pub discriminator_loss_unweighted: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub entries: Vec<EpochLog>,
}

impl TrainLog {
    /// CSV without wall time, so reruns produce identical bytes.
    pub fn write_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["epoch", "generator_loss", "discriminator_loss", "discriminator_loss_unweighted"])?;
        for e in &self.entries {
            w.write_record([
                e.epoch.to_string(),
                e.generator_loss.to_string(),
                e.discriminator_loss.to_string(),
                e.discriminator_loss_unweighted.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn sample_noise(n: usize, noise_dim: usize, seed: u64) -> Tensor {
    sample_noise_with(n, noise_dim, &mut seeded(seed))
}

pub(crate) fn sample_noise_with<R: Rng + ?Sized>(n: usize, noise_dim: usize, rng: &mut R) -> Tensor {
    let data = (0..n * noise_dim).map(|_| StandardNormal.sample(rng)).collect();
    Tensor::from_vec(n, noise_dim, data).expect("shape matches")
}

/// Discriminator loss on logits. Real label 1, fake label 0.
pub fn discriminator_loss(
    g: &mut Graph,
    d_real: Var,
    d_fake: Var,
    w_real: &[f64],
    w_fake: &[f64],
    kind: LossKind,
) -> Result<Var> {
    match kind {
        LossKind::ClassicSigmoid => {
            let ones = vec![1.0; g.value(d_real).len()];
            let zeros = vec![0.0; g.value(d_fake).len()];
            let real = g.bce_with_logits(d_real, &ones, w_real)?;
            let fake = g.bce_with_logits(d_fake, &zeros, w_fake)?;
            g.add(real, fake)
        }
        LossKind::ScoreDifference => {
            let sr = g.sigmoid(d_real);
            let sf = g.sigmoid(d_fake);
            let fake = g.weighted_mean(sf, w_fake)?;
            let real = g.weighted_mean(sr, w_real)?;
            g.sub(fake, real)
        }
    }
}

/// Generator loss on discriminator logits of generated samples
/// (non-saturating for the sigmoid kind).
pub fn generator_loss(g: &mut Graph, d_fake: Var, w_fake: &[f64], kind: LossKind) -> Result<Var> {
    match kind {
        LossKind::ClassicSigmoid => {
            let ones = vec![1.0; g.value(d_fake).len()];
            g.bce_with_logits(d_fake, &ones, w_fake)
        }
        LossKind::ScoreDifference => {
            let sf = g.sigmoid(d_fake);
            let m = g.weighted_mean(sf, w_fake)?;
            Ok(g.scalar_mul(m, -1.0))
        }
    }
}

/// Per-row weights of a domain's real samples.
pub fn real_weights<R: Rng + ?Sized>(
    mode: WeightMode,
    manifold: &ManifoldModel,
    partition: &Partition,
    rows: &Tensor,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(match mode {
        WeightMode::Importance => partition.compute_weights(&manifold.encode(rows)?)?.weights,
        WeightMode::Uniform => vec![1.0; rows.rows()],
        WeightMode::Random => (0..rows.rows()).map(|_| 1.0 - rng.random::<f64>()).collect(),
    })
}

/// Per-row weights of one generated minibatch, counted within the batch.
pub fn fake_weights<R: Rng + ?Sized>(
    mode: WeightMode,
    fake_weighting: FakeWeighting,
    manifold: &ManifoldModel,
    partition: &Partition,
    fake: &Tensor,
    rng: &mut R,
) -> Result<Vec<f64>> {
    match (mode, fake_weighting) {
        (WeightMode::Uniform, _) | (_, FakeWeighting::Uniform) => Ok(vec![1.0; fake.rows()]),
        (WeightMode::Importance, FakeWeighting::Minibatch) => {
            Ok(partition.compute_weights(&manifold.encode(fake)?)?.weights)
        }
        (WeightMode::Random, FakeWeighting::Minibatch) => Ok((0..fake.rows()).map(|_| 1.0 - rng.random::<f64>()).collect()),
    }
}

pub(crate) fn with_epoch(epoch: usize) -> impl Fn(GeomError) -> GeomError {
    move |e| match e {
        GeomError::Divergence { what, .. } => GeomError::Divergence { what, epoch },
        other => other,
    }
}

pub(crate) fn finite_item(g: &Graph, v: Var, what: &str, epoch: usize) -> Result<f64> {
    let x = g.value(v).item();
    if x.is_finite() {
        Ok(x)
    } else {
        Err(GeomError::Divergence { what: what.into(), epoch })
    }
}

/// Builds the generator (noise to data) and discriminator (data to one logit).
pub fn init_gan(cfg: &GanConfig, data_dim: usize, seed: u64) -> Result<(Mlp, Mlp)> {
    let mut gd = vec![cfg.noise_dim];
    gd.extend_from_slice(&cfg.generator_hidden);
    gd.push(data_dim);
    let mut dd = vec![data_dim];
    dd.extend_from_slice(&cfg.discriminator_hidden);
    dd.push(1);
    let gen = init_mlp(&gd, &leaky_activations(gd.len() - 1, Activation::Linear), derive_seed(seed, 10))?;
    let disc = init_mlp(&dd, &leaky_activations(dd.len() - 1, Activation::Linear), derive_seed(seed, 11))?;
    Ok((gen, disc))
}

/// Trains a geometry-matching GAN on `data`.
///
/// Each minibatch runs `disc_steps_per_gen_step` discriminator updates, then
/// one generator update, each with fresh noise.
pub fn train_mg_gan(
    data: &Dataset,
    manifold: &ManifoldModel,
    partition: &Partition,
    cfg: &GanConfig,
    epochs: usize,
    seed: u64,
) -> Result<(Mlp, Mlp, TrainLog)> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(GeomError::Config("cannot train on an empty dataset".into()));
    }
    if manifold.input_dim() != data.dim() {
        return Err(GeomError::Dimension { op: "manifold input", left: (1, manifold.input_dim()), right: (1, data.dim()) });
    }
    let (mut gen, mut disc) = init_gan(cfg, data.dim(), seed)?;
    let mut gen_opt = Optimizer::new(cfg.optimizer, cfg.learning_rate);
    let mut disc_opt = Optimizer::new(cfg.optimizer, cfg.learning_rate);
    let mut batch_rng = seeded(derive_seed(seed, 12));
    let mut noise_rng = seeded(derive_seed(seed, 13));
    let mut weight_rng = seeded(derive_seed(seed, 14));
    let x_all = data.rows();
    let w_all = real_weights(cfg.weight_mode, manifold, partition, x_all, &mut weight_rng)?;
    let mut log = TrainLog::default();

    for epoch in 0..epochs {
        let start = Instant::now();
        let (mut gl, mut dl, mut dlu, mut nb) = (0.0, 0.0, 0.0, 0usize);
        for batch in minibatches(data.len(), cfg.batch_size, &mut batch_rng) {
            let b = batch.len();
            let real = x_all.select_rows(&batch);
            let w_real: Vec<f64> = batch.iter().map(|&i| w_all[i]).collect();
            for _ in 0..cfg.disc_steps_per_gen_step {
                let fake = gen.predict(&sample_noise_with(b, cfg.noise_dim, &mut noise_rng))?;
                let w_fake = fake_weights(cfg.weight_mode, cfg.fake_weighting, manifold, partition, &fake, &mut weight_rng)?;
                let mut g = Graph::new();
                let d = disc.bind(&mut g, true);
                let xr = g.constant(real.clone());
                let xf = g.constant(fake);
                let lr = d.forward(&mut g, xr)?;
                let lf = d.forward(&mut g, xf)?;
                let loss = discriminator_loss(&mut g, lr, lf, &w_real, &w_fake, cfg.loss_kind)?;
                dl += finite_item(&g, loss, "discriminator loss", epoch)?;
                let uniform = vec![1.0; b];
                let plain = discriminator_loss(&mut g, lr, lf, &uniform, &uniform, cfg.loss_kind)?;
                dlu += g.value(plain).item();
                g.backward(loss)?;
                disc_opt.step_mlp(&mut disc, &mut d.grads(&g)).map_err(with_epoch(epoch))?;
            }
            let mut g = Graph::new();
            let gb = gen.bind(&mut g, true);
            let d = disc.bind(&mut g, false);
            let z = g.constant(sample_noise_with(b, cfg.noise_dim, &mut noise_rng));
            let fake = gb.forward(&mut g, z)?;
            let w_fake = if cfg.weight_generator {
                fake_weights(cfg.weight_mode, cfg.fake_weighting, manifold, partition, g.value(fake), &mut weight_rng)?
            } else {
                vec![1.0; b]
            };
            let lf = d.forward(&mut g, fake)?;
            let loss = generator_loss(&mut g, lf, &w_fake, cfg.loss_kind)?;
            gl += finite_item(&g, loss, "generator loss", epoch)?;
            g.backward(loss)?;
            gen_opt.step_mlp(&mut gen, &mut gb.grads(&g)).map_err(with_epoch(epoch))?;
            nb += 1;
        }
        let ds = (nb * cfg.disc_steps_per_gen_step) as f64;
        log.entries.push(EpochLog {
            epoch,
            generator_loss: gl / nb as f64,
            discriminator_loss: dl / ds,
            discriminator_loss_unweighted: dlu / ds,
            wall_seconds: start.elapsed().as_secs_f64(),
        });
        log::debug!("gan epoch {epoch}: G {:.4} D {:.4}", gl / nb as f64, dl / ds);
    }
    Ok((gen, disc, log))
}

/// `n` generated rows from fresh noise.
pub fn generate(generator: &Mlp, n: usize, seed: u64) -> Result<Tensor> {
    generator.predict(&sample_noise(n, generator.input_dim(), seed))
}
