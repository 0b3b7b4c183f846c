//! Two-domain manifold geometry matching: a cycle-consistent pair of
//! geometry-matching GANs plus a loss that preserves pairwise latent
//! distances across the mapping.

use std::path::Path;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{pairwise_distances, Graph, Tensor, Var};
use crate::data::Dataset;
use crate::error::{GeomError, Result};
use crate::gan::{
    discriminator_loss, fake_weights, finite_item, generator_loss, real_weights, with_epoch, FakeWeighting, LossKind,
    WeightMode,
};
use crate::manifold::{train_autoencoder, AutoencoderConfig, ManifoldModel};
use crate::nn::{init_mlp, leaky_activations, load_model, save_model, Activation, BoundMlp, Mlp, Optimizer, OptimizerKind};
use crate::partition::{select_k_bic, Partition};
use crate::rng::{derive_seed, seeded};

/// Which model the training loop reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MgmMode {
    /// Importance weights with cycle, identity and geometry losses.
    #[default]
    Mgm,
    /// Two independent uniform-weight GANs.
    Gan,
    /// Uniform weights, cycle and identity losses, no geometry loss.
    CycleGan,
    /// The full model with random per-point weights.
    RandomWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconLoss {
    #[default]
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub cycle: f64,
    pub identity: f64,
    pub geometry: f64,
}

impl Default for Coefficients {
    fn default() -> Self {
        Self { cycle: 1.0, identity: 0.1, geometry: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MgmConfig {
    pub mode: MgmMode,
    /// Generator hidden widths; the generators are shaped like the autoencoders.
    pub generator_hidden: Vec<usize>,
    pub discriminator_hidden: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub loss_kind: LossKind,
    pub recon_loss: ReconLoss,
    pub coefficients: Coefficients,
    pub fake_weighting: FakeWeighting,
    pub weight_generator: bool,
    pub optimizer: OptimizerKind,
    /// Add a skip connection `G(x) = x + f(x)` when both domains have the same width.
    pub residual_generators: bool,
}

impl Default for MgmConfig {
    fn default() -> Self {
        Self {
            mode: MgmMode::Mgm,
            generator_hidden: vec![200, 100, 50, 10, 50, 100, 200],
            discriminator_hidden: vec![200, 100, 50],
            learning_rate: 0.001,
            batch_size: 200,
            loss_kind: LossKind::ClassicSigmoid,
            recon_loss: ReconLoss::L1,
            coefficients: Coefficients::default(),
            fake_weighting: FakeWeighting::Minibatch,
            weight_generator: true,
            optimizer: OptimizerKind::Adam,
            residual_generators: true,
        }
    }
}

impl MgmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 2 {
            return Err(GeomError::Config("batch_size must be at least 2".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(GeomError::Config(format!("learning_rate {} must be positive", self.learning_rate)));
        }
        let c = self.coefficients;
        if [c.cycle, c.identity, c.geometry].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(GeomError::Config("loss coefficients must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// Weight mode and coefficients after applying the baseline mode.
    pub fn effective(&self) -> (WeightMode, Coefficients) {
        let c = self.coefficients;
        match self.mode {
            MgmMode::Mgm => (WeightMode::Importance, c),
            MgmMode::Gan => (WeightMode::Uniform, Coefficients { cycle: 0.0, identity: 0.0, geometry: 0.0 }),
            MgmMode::CycleGan => (WeightMode::Uniform, Coefficients { geometry: 0.0, ..c }),
            MgmMode::RandomWeights => (WeightMode::Random, c),
        }
    }
}

/// A domain's frozen autoencoder and the partition of its latent space.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub manifold: ManifoldModel,
    pub partition: Partition,
}

/// Trains the domain autoencoder and selects its partition by BIC.
pub fn prepare_domain(
    data: &Dataset,
    ae: &AutoencoderConfig,
    k_range: (usize, usize),
    seed: u64,
) -> Result<Domain> {
    let manifold = train_autoencoder(data, ae, derive_seed(seed, 20))?;
    let latents = manifold.encode(data.rows())?;
    let partition = select_k_bic(&latents, k_range.0, k_range.1, derive_seed(seed, 21))?;
    Ok(Domain { manifold, partition })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MgmModel {
    pub gen_xy: Mlp,
    pub gen_yx: Mlp,
    pub disc_x: Mlp,
    pub disc_y: Mlp,
    pub x: Domain,
    pub y: Domain,
    pub coefficients: Coefficients,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MgmEpochLog {
    pub epoch: usize,
    pub generator_total: f64,
    pub adversarial: f64,
    pub cycle: f64,
    pub identity: f64,
    pub geometry: f64,
    pub discriminator_x: f64,
    pub discriminator_y: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MgmLog {
    pub entries: Vec<MgmEpochLog>,
}

impl MgmLog {
    /// CSV without wall time, so reruns produce identical bytes.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "epoch",
            "generator_total",
            "adversarial",
            "cycle",
            "identity",
            "geometry",
            "discriminator_x",
            "discriminator_y",
        ])?;
        for e in &self.entries {
            w.write_record(
                [e.adversarial, e.cycle, e.identity, e.geometry, e.discriminator_x, e.discriminator_y]
                    .iter()
                    .fold(vec![e.epoch.to_string(), e.generator_total.to_string()], |mut v, x| {
                        v.push(x.to_string());
                        v
                    }),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

fn recon(g: &mut Graph, a: Var, b: Var, kind: ReconLoss) -> Result<Var> {
    match kind {
        ReconLoss::L1 => g.l1(a, b),
        ReconLoss::L2 => g.mse(a, b),
    }
}

/// Mean squared difference between the source latent pair distances (fixed)
/// and the pair distances of `mapped` under the frozen target encoder.
fn geometry_term(g: &mut Graph, source_latents: &Tensor, mapped: Var, target_encoder: &BoundMlp) -> Result<Var> {
    if source_latents.rows() < 2 {
        return Err(GeomError::Config("geometry loss needs a batch of at least 2".into()));
    }
    let d_src = g.constant(pairwise_distances(source_latents));
    let z = target_encoder.forward(g, mapped)?;
    let d_map = g.pairwise_distances(z);
    g.mse(d_map, d_src)
}

fn dims_match(gen_xy: &Mlp) -> bool {
    gen_xy.input_dim() == gen_xy.output_dim()
}

/// `mean|G_YX(G_XY(x)) - x| + mean|G_XY(G_YX(y)) - y|` (or squared).
pub fn cycle_loss(x: &Tensor, y: &Tensor, gen_xy: &Mlp, gen_yx: &Mlp, kind: ReconLoss) -> Result<f64> {
    let mut g = Graph::new();
    let (vx, vy) = (g.constant(x.clone()), g.constant(y.clone()));
    let (xy, yx) = (gen_xy.bind(&mut g, false), gen_yx.bind(&mut g, false));
    let fy = xy.forward(&mut g, vx)?;
    let rx = yx.forward(&mut g, fy)?;
    let fx = yx.forward(&mut g, vy)?;
    let ry = xy.forward(&mut g, fx)?;
    let a = recon(&mut g, rx, vx, kind)?;
    let b = recon(&mut g, ry, vy, kind)?;
    let t = g.add(a, b)?;
    Ok(g.value(t).item())
}

/// `mean|gen(x) - x|` for a generator into `x`'s own space. `None` (with a
/// warning) when the generator changes dimension.
pub fn identity_loss(x: &Tensor, gen: &Mlp, kind: ReconLoss) -> Result<Option<f64>> {
    if !dims_match(gen) {
        log::warn!("identity loss skipped: generator maps {} to {} features", gen.input_dim(), gen.output_dim());
        return Ok(None);
    }
    let mut g = Graph::new();
    let vx = g.constant(x.clone());
    let b = gen.bind(&mut g, false);
    let out = b.forward(&mut g, vx)?;
    let l = recon(&mut g, out, vx, kind)?;
    Ok(Some(g.value(l).item()))
}

/// Geometry loss of mapping `x` with `gen_xy`: mean over unordered pairs of
/// `(|M_x(x_i) - M_x(x_j)| - |M_y(G(x_i)) - M_y(G(x_j))|)^2`.
pub fn manifold_geometry_loss(
    x: &Tensor,
    gen_xy: &Mlp,
    manifold_x: &ManifoldModel,
    manifold_y: &ManifoldModel,
) -> Result<f64> {
    let mut g = Graph::new();
    let vx = g.constant(x.clone());
    let b = gen_xy.bind(&mut g, false);
    let mapped = b.forward(&mut g, vx)?;
    let enc = manifold_y.encoder.bind(&mut g, false);
    let l = geometry_term(&mut g, &manifold_x.encode(x)?, mapped, &enc)?;
    Ok(g.value(l).item())
}

/// Graph handles of one generator objective evaluation.
pub(crate) struct Objective {
    pub adversarial: Var,
    pub cycle: Option<Var>,
    pub identity: Option<Var>,
    pub geometry: Option<Var>,
    pub total: Var,
}

pub(crate) struct Nets<'a> {
    pub gen_xy: &'a BoundMlp,
    pub gen_yx: &'a BoundMlp,
    pub disc_x: &'a BoundMlp,
    pub disc_y: &'a BoundMlp,
    pub enc_x: &'a BoundMlp,
    pub enc_y: &'a BoundMlp,
}

pub(crate) struct Batch<'a> {
    pub x: &'a Tensor,
    pub y: &'a Tensor,
    /// Latent codes of `x` and `y` under their own manifolds.
    pub zx: &'a Tensor,
    pub zy: &'a Tensor,
}

/// Builds the weighted generator objective. Terms with a zero coefficient
/// are left out of the graph; they would contribute exact zeros.
#[allow(clippy::too_many_arguments)]
pub(crate) fn generator_objective<R: Rng + ?Sized>(
    g: &mut Graph,
    nets: &Nets<'_>,
    batch: &Batch<'_>,
    domains: (&Domain, &Domain),
    weight_mode: WeightMode,
    coef: Coefficients,
    cfg: &MgmConfig,
    rng: &mut R,
) -> Result<Objective> {
    let vx = g.constant(batch.x.clone());
    let vy = g.constant(batch.y.clone());
    let fy = nets.gen_xy.forward(g, vx)?;
    let fx = nets.gen_yx.forward(g, vy)?;
    let (wfy, wfx) = if cfg.weight_generator {
        let (dx, dy) = domains;
        (
            fake_weights(weight_mode, cfg.fake_weighting, &dy.manifold, &dy.partition, g.value(fy), rng)?,
            fake_weights(weight_mode, cfg.fake_weighting, &dx.manifold, &dx.partition, g.value(fx), rng)?,
        )
    } else {
        (vec![1.0; batch.x.rows()], vec![1.0; batch.y.rows()])
    };
    let ly = nets.disc_y.forward(g, fy)?;
    let lx = nets.disc_x.forward(g, fx)?;
    let adv_y = generator_loss(g, ly, &wfy, cfg.loss_kind)?;
    let adv_x = generator_loss(g, lx, &wfx, cfg.loss_kind)?;
    let adversarial = g.add(adv_y, adv_x)?;
    let mut total = adversarial;

    let mut cycle = None;
    if coef.cycle > 0.0 {
        let rx = nets.gen_yx.forward(g, fy)?;
        let ry = nets.gen_xy.forward(g, fx)?;
        let a = recon(g, rx, vx, cfg.recon_loss)?;
        let b = recon(g, ry, vy, cfg.recon_loss)?;
        let c = g.add(a, b)?;
        let s = g.scalar_mul(c, coef.cycle);
        total = g.add(total, s)?;
        cycle = Some(c);
    }
    let mut identity = None;
    if coef.identity > 0.0 && batch.x.cols() == batch.y.cols() {
        let ix = nets.gen_yx.forward(g, vx)?;
        let iy = nets.gen_xy.forward(g, vy)?;
        let a = recon(g, ix, vx, cfg.recon_loss)?;
        let b = recon(g, iy, vy, cfg.recon_loss)?;
        let c = g.add(a, b)?;
        let s = g.scalar_mul(c, coef.identity);
        total = g.add(total, s)?;
        identity = Some(c);
    }
    let mut geometry = None;
    if coef.geometry > 0.0 {
        let a = geometry_term(g, batch.zx, fy, nets.enc_y)?;
        let b = geometry_term(g, batch.zy, fx, nets.enc_x)?;
        let c = g.add(a, b)?;
        let s = g.scalar_mul(c, coef.geometry);
        total = g.add(total, s)?;
        geometry = Some(c);
    }
    Ok(Objective { adversarial, cycle, identity, geometry, total })
}

/// Shuffled batches where no batch has fewer than two rows (a short tail is
/// folded into the previous batch).
fn batches_min2<R: Rng + ?Sized>(n: usize, batch: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut b = crate::nn::minibatches(n, batch, rng);
    if b.len() > 1 && b.last().is_some_and(|l| l.len() < 2) {
        let tail = b.pop().expect("nonempty");
        b.last_mut().expect("nonempty").extend(tail);
    }
    b
}

pub fn init_generators(cfg: &MgmConfig, dx: usize, dy: usize, seed: u64) -> Result<(Mlp, Mlp, Mlp, Mlp)> {
    let chain = |a: usize, hidden: &[usize], b: usize| {
        let mut d = vec![a];
        d.extend_from_slice(hidden);
        d.push(b);
        d
    };
    let net = |dims: Vec<usize>, s: u64| init_mlp(&dims, &leaky_activations(dims.len() - 1, Activation::Linear), s);
    let residual = cfg.residual_generators && dx == dy;
    Ok((
        net(chain(dx, &cfg.generator_hidden, dy), derive_seed(seed, 30))?.with_residual(residual)?,
        net(chain(dy, &cfg.generator_hidden, dx), derive_seed(seed, 31))?.with_residual(residual)?,
        net(chain(dx, &cfg.discriminator_hidden, 1), derive_seed(seed, 32))?,
        net(chain(dy, &cfg.discriminator_hidden, 1), derive_seed(seed, 33))?,
    ))
}

/// Trains the cycle-consistent pair.
///
/// Every step updates both discriminators on the current batches, then both
/// generators jointly on the combined objective.
pub fn train_mgm(
    data_x: &Dataset,
    data_y: &Dataset,
    x: Domain,
    y: Domain,
    cfg: &MgmConfig,
    epochs: usize,
    seed: u64,
) -> Result<(MgmModel, MgmLog)> {
    cfg.validate()?;
    if data_x.len() < 2 || data_y.len() < 2 {
        return Err(GeomError::Config("each domain needs at least 2 rows".into()));
    }
    for (d, m, name) in [(data_x, &x.manifold, "x"), (data_y, &y.manifold, "y")] {
        if m.input_dim() != d.dim() {
            return Err(GeomError::Config(format!("domain {name} manifold expects {} features, data has {}", m.input_dim(), d.dim())));
        }
    }
    let (weight_mode, coef) = cfg.effective();
    if coef.identity > 0.0 && data_x.dim() != data_y.dim() {
        log::warn!("identity loss disabled: domains have {} and {} features", data_x.dim(), data_y.dim());
    }
    let (mut gen_xy, mut gen_yx, mut disc_x, mut disc_y) = init_generators(cfg, data_x.dim(), data_y.dim(), seed)?;
    let hashes = (x.manifold.param_hash(), y.manifold.param_hash());
    let mut opt_gxy = Optimizer::new(cfg.optimizer, cfg.learning_rate);
    let mut opt_gyx = Optimizer::new(cfg.optimizer, cfg.learning_rate);
    let mut opt_dx = Optimizer::new(cfg.optimizer, cfg.learning_rate);
    let mut opt_dy = Optimizer::new(cfg.optimizer, cfg.learning_rate);
    let mut batch_rng = seeded(derive_seed(seed, 34));
    let mut weight_rng = seeded(derive_seed(seed, 35));

    let (xa, ya) = (data_x.rows(), data_y.rows());
    let (zxa, zya) = (x.manifold.encode(xa)?, y.manifold.encode(ya)?);
    let wx_all = real_weights(weight_mode, &x.manifold, &x.partition, xa, &mut weight_rng)?;
    let wy_all = real_weights(weight_mode, &y.manifold, &y.partition, ya, &mut weight_rng)?;
    let mut log = MgmLog::default();

    for epoch in 0..epochs {
        let start = Instant::now();
        let bx = batches_min2(xa.rows(), cfg.batch_size, &mut batch_rng);
        let by = batches_min2(ya.rows(), cfg.batch_size, &mut batch_rng);
        let steps = bx.len().max(by.len());
        let mut acc = MgmEpochLog { epoch, ..Default::default() };
        for s in 0..steps {
            let (ix, iy) = (&bx[s % bx.len()], &by[s % by.len()]);
            let (xb, yb) = (xa.select_rows(ix), ya.select_rows(iy));
            let (zxb, zyb) = (zxa.select_rows(ix), zya.select_rows(iy));
            let wxb: Vec<f64> = ix.iter().map(|&i| wx_all[i]).collect();
            let wyb: Vec<f64> = iy.iter().map(|&i| wy_all[i]).collect();

            // discriminators
            let fake_y = gen_xy.predict(&xb)?;
            let fake_x = gen_yx.predict(&yb)?;
            for (disc, opt, real, w_real, fake, dom, slot) in [
                (&mut disc_y, &mut opt_dy, &yb, &wyb, fake_y, &y, &mut acc.discriminator_y),
                (&mut disc_x, &mut opt_dx, &xb, &wxb, fake_x, &x, &mut acc.discriminator_x),
            ] {
                let w_fake = fake_weights(weight_mode, cfg.fake_weighting, &dom.manifold, &dom.partition, &fake, &mut weight_rng)?;
                let mut g = Graph::new();
                let d = disc.bind(&mut g, true);
                let vr = g.constant(real.clone());
                let vf = g.constant(fake);
                let lr = d.forward(&mut g, vr)?;
                let lf = d.forward(&mut g, vf)?;
                let loss = discriminator_loss(&mut g, lr, lf, w_real, &w_fake, cfg.loss_kind)?;
                *slot += finite_item(&g, loss, "discriminator loss", epoch)?;
                g.backward(loss)?;
                opt.step_mlp(disc, &mut d.grads(&g)).map_err(with_epoch(epoch))?;
            }

            // generators
            let mut g = Graph::new();
            let gxy = gen_xy.bind(&mut g, true);
            let gyx = gen_yx.bind(&mut g, true);
            let dxb = disc_x.bind(&mut g, false);
            let dyb = disc_y.bind(&mut g, false);
            let exb = x.manifold.encoder.bind(&mut g, false);
            let eyb = y.manifold.encoder.bind(&mut g, false);
            let nets = Nets { gen_xy: &gxy, gen_yx: &gyx, disc_x: &dxb, disc_y: &dyb, enc_x: &exb, enc_y: &eyb };
            let batch = Batch { x: &xb, y: &yb, zx: &zxb, zy: &zyb };
            let obj = generator_objective(&mut g, &nets, &batch, (&x, &y), weight_mode, coef, cfg, &mut weight_rng)?;
            acc.generator_total += finite_item(&g, obj.total, "generator loss", epoch)?;
            acc.adversarial += g.value(obj.adversarial).item();
            acc.cycle += obj.cycle.map_or(0.0, |v| g.value(v).item());
            acc.identity += obj.identity.map_or(0.0, |v| g.value(v).item());
            acc.geometry += obj.geometry.map_or(0.0, |v| g.value(v).item());
            g.backward(obj.total)?;
            opt_gxy.step_mlp(&mut gen_xy, &mut gxy.grads(&g)).map_err(with_epoch(epoch))?;
            opt_gyx.step_mlp(&mut gen_yx, &mut gyx.grads(&g)).map_err(with_epoch(epoch))?;
        }
        let n = steps as f64;
        for v in [
            &mut acc.generator_total,
            &mut acc.adversarial,
            &mut acc.cycle,
            &mut acc.identity,
            &mut acc.geometry,
            &mut acc.discriminator_x,
            &mut acc.discriminator_y,
        ] {
            *v /= n;
        }
        acc.wall_seconds = start.elapsed().as_secs_f64();
        log::debug!(
            "mgm epoch {epoch}: G {:.4} (adv {:.4} cyc {:.4} mg {:.4}) Dx {:.4} Dy {:.4}",
            acc.generator_total,
            acc.adversarial,
            acc.cycle,
            acc.geometry,
            acc.discriminator_x,
            acc.discriminator_y
        );
        log.entries.push(acc);
    }
    if (x.manifold.param_hash(), y.manifold.param_hash()) != hashes {
        return Err(GeomError::Contract("manifold parameters changed during training".into()));
    }
    Ok((MgmModel { gen_xy, gen_yx, disc_x, disc_y, x, y, coefficients: coef }, log))
}

pub fn map_x_to_y(model: &MgmModel, rows: &Tensor) -> Result<Tensor> {
    model.gen_xy.predict(rows)
}

pub fn map_y_to_x(model: &MgmModel, rows: &Tensor) -> Result<Tensor> {
    model.gen_yx.predict(rows)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleManifest {
    coefficients: Coefficients,
    files: Vec<String>,
}

const NETS: [&str; 4] = ["gen_xy.gmgn", "gen_yx.gmgn", "disc_x.gmgn", "disc_y.gmgn"];

impl MgmModel {
    /// Writes model files, manifolds, partition exports and a JSON manifest into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        for (mlp, name) in [&self.gen_xy, &self.gen_yx, &self.disc_x, &self.disc_y].into_iter().zip(NETS) {
            save_model(mlp, dir.join(name))?;
        }
        let mut files: Vec<String> = NETS.iter().map(|s| s.to_string()).collect();
        for (dom, tag) in [(&self.x, "x"), (&self.y, "y")] {
            dom.manifold.save(dir.join(format!("manifold_{tag}.gmae")))?;
            dom.partition
                .export(dir.join(format!("partition_{tag}.csv")), dir.join(format!("partition_{tag}.json")))?;
            files.extend([format!("manifold_{tag}.gmae"), format!("partition_{tag}.csv"), format!("partition_{tag}.json")]);
        }
        let manifest = BundleManifest { coefficients: self.coefficients, files };
        std::fs::write(dir.join("model.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let manifest: BundleManifest = serde_json::from_str(&std::fs::read_to_string(dir.join("model.json"))?)?;
        let net = |i: usize| load_model(dir.join(NETS[i]));
        let domain = |tag: &str| -> Result<Domain> {
            Ok(Domain {
                manifold: ManifoldModel::load(dir.join(format!("manifold_{tag}.gmae")))?,
                partition: Partition::import(dir.join(format!("partition_{tag}.csv")), dir.join(format!("partition_{tag}.json")))?,
            })
        };
        Ok(Self {
            gen_xy: net(0)?,
            gen_yx: net(1)?,
            disc_x: net(2)?,
            disc_y: net(3)?,
            x: domain("x")?,
            y: domain("y")?,
            coefficients: manifest.coefficients,
        })
    }
}
