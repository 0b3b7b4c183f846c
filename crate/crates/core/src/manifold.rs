//! Per-domain autoencoders whose latent layer serves as the manifold map.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::autodiff::{pairwise_distances, Graph, Tensor};
use crate::data::Dataset;
use crate::error::{GeomError, Result};
use crate::nn::{self, init_mlp, leaky_activations, minibatches, Activation, Mlp, Optimizer, OptimizerKind};
use crate::rng::{derive_seed, seeded};

pub const MANIFOLD_MAGIC: &[u8; 4] = b"GMAE";
pub const MANIFOLD_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AutoencoderConfig {
    /// Hidden widths from the first encoder layer to the last decoder layer;
    /// the smallest entry is the latent layer.
    pub hidden_dims: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    /// Stop when epoch MSE improved by less than this over `patience` epochs.
    pub early_stop_tol: f64,
    pub patience: usize,
    /// Rescale the latent layer after training so the mean pairwise latent
    /// distance is 1. Independently trained autoencoders then share a common
    /// distance unit, whatever the units of their data.
    pub calibrate_latent_scale: bool,
}

impl Default for AutoencoderConfig {
    fn default() -> Self {
        Self {
            hidden_dims: vec![200, 100, 50, 10, 50, 100, 200],
            epochs: 200,
            batch_size: 200,
            learning_rate: 0.001,
            optimizer: OptimizerKind::Adam,
            early_stop_tol: 1e-6,
            patience: 10,
            calibrate_latent_scale: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub final_mse: f64,
    pub epochs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldModel {
    pub encoder: Mlp,
    pub decoder: Mlp,
    pub latent_dim: usize,
    pub report: TrainingReport,
}

/// Encoder/decoder widths for data of width `input_dim`, split at the
/// smallest hidden entry (first occurrence).
pub fn split_dims(input_dim: usize, hidden: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if hidden.is_empty() || hidden.contains(&0) {
        return Err(GeomError::Config(format!("autoencoder hidden dims {hidden:?} must be nonempty and positive")));
    }
    let latent_at = hidden
        .iter()
        .enumerate()
        .min_by_key(|&(i, &d)| (d, i))
        .map(|(i, _)| i)
        .expect("nonempty");
    let mut enc = vec![input_dim];
    enc.extend_from_slice(&hidden[..=latent_at]);
    let mut dec = hidden[latent_at..].to_vec();
    dec.push(input_dim);
    Ok((enc, dec))
}

/// Trains an autoencoder on `data` and returns it frozen. Leaky ReLU on all
/// layers except the latent and output layers, which are linear.
pub fn train_autoencoder(data: &Dataset, cfg: &AutoencoderConfig, seed: u64) -> Result<ManifoldModel> {
    if data.is_empty() {
        return Err(GeomError::Config("cannot train an autoencoder on an empty dataset".into()));
    }
    if cfg.batch_size == 0 {
        return Err(GeomError::Config("batch size must be positive".into()));
    }
    let (enc_dims, dec_dims) = split_dims(data.dim(), &cfg.hidden_dims)?;
    let latent_dim = *enc_dims.last().expect("nonempty");
    let mut encoder = init_mlp(&enc_dims, &leaky_activations(enc_dims.len() - 1, Activation::Linear), derive_seed(seed, 1))?;
    let mut decoder = init_mlp(&dec_dims, &leaky_activations(dec_dims.len() - 1, Activation::Linear), derive_seed(seed, 2))?;
    let mut enc_opt = Optimizer::new(cfg.optimizer, cfg.learning_rate);
    let mut dec_opt = Optimizer::new(cfg.optimizer, cfg.learning_rate);
    let mut rng = seeded(derive_seed(seed, 3));
    let x_all = data.rows();
    let mut history: Vec<f64> = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let mut total = 0.0;
        for batch in minibatches(data.len(), cfg.batch_size, &mut rng) {
            let mut g = Graph::new();
            let x = g.constant(x_all.select_rows(&batch));
            let enc = encoder.bind(&mut g, true);
            let dec = decoder.bind(&mut g, true);
            let z = enc.forward(&mut g, x)?;
            let recon = dec.forward(&mut g, z)?;
            let loss = g.mse(recon, x)?;
            let lv = g.value(loss).item();
            if !lv.is_finite() {
                return Err(GeomError::Divergence { what: "autoencoder reconstruction loss".into(), epoch });
            }
            total += lv * batch.len() as f64;
            g.backward(loss)?;
            let tag = |e: GeomError| match e {
                GeomError::Divergence { what, .. } => GeomError::Divergence { what, epoch },
                other => other,
            };
            enc_opt.step_mlp(&mut encoder, &mut enc.grads(&g)).map_err(tag)?;
            dec_opt.step_mlp(&mut decoder, &mut dec.grads(&g)).map_err(tag)?;
        }
        history.push(total / data.len() as f64);
        let e = history.len() - 1;
        if cfg.patience > 0 && e >= cfg.patience && history[e - cfg.patience] - history[e] < cfg.early_stop_tol {
            break;
        }
    }

    if cfg.calibrate_latent_scale {
        calibrate_scale(&mut encoder, &mut decoder, x_all)?;
    }
    let mut model = ManifoldModel {
        encoder,
        decoder,
        latent_dim,
        report: TrainingReport { final_mse: 0.0, epochs: history.len() },
    };
    model.report.final_mse = model.reconstruction_mse(x_all)?;
    Ok(model)
}

/// Multiplies the (linear) latent layer by `s` and divides the first decoder
/// weights by `s`, where `s` brings the mean latent pair distance over an
/// evenly spaced sample of at most 400 rows to 1.
fn calibrate_scale(encoder: &mut Mlp, decoder: &mut Mlp, x: &Tensor) -> Result<()> {
    let n = x.rows();
    let m = n.min(400);
    if m < 2 {
        return Ok(());
    }
    let idx: Vec<usize> = (0..m).map(|i| i * n / m).collect();
    let latent_mean = pairwise_distances(&encoder.predict(&x.select_rows(&idx))?).mean();
    if !(latent_mean > 0.0 && latent_mean.is_finite()) {
        return Ok(());
    }
    let s = 1.0 / latent_mean;
    let mut ep = encoder.params_mut();
    let k = ep.len();
    for t in ep[k - 2..].iter_mut() {
        t.data_mut().iter_mut().for_each(|v| *v *= s);
    }
    decoder.params_mut()[0].data_mut().iter_mut().for_each(|v| *v /= s);
    Ok(())
}

impl ManifoldModel {
    pub fn input_dim(&self) -> usize {
        self.encoder.input_dim()
    }

    pub fn encode(&self, x: &Tensor) -> Result<Tensor> {
        self.encoder.predict(x)
    }

    pub fn decode(&self, z: &Tensor) -> Result<Tensor> {
        self.decoder.predict(z)
    }

    pub fn reconstruction_mse(&self, x: &Tensor) -> Result<f64> {
        let recon = self.decode(&self.encode(x)?)?;
        Ok(recon.zip_map(x, |a, b| (a - b) * (a - b)).mean())
    }

    /// SHA-256 over all parameter bytes, hex encoded.
    pub fn param_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.encoder.param_bytes());
        h.update(self.decoder.param_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `GMAE | version u16 | latent_dim u32 | encoder GMGN block | decoder GMGN block
    /// | final_mse f64 | epochs u32`, little-endian.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MANIFOLD_MAGIC)?;
        w.write_all(&MANIFOLD_VERSION.to_le_bytes())?;
        w.write_all(&(self.latent_dim as u32).to_le_bytes())?;
        nn::write_mlp(w, &self.encoder)?;
        nn::write_mlp(w, &self.decoder)?;
        w.write_all(&self.report.final_mse.to_le_bytes())?;
        w.write_all(&(self.report.epochs as u32).to_le_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut buf = [0u8; 10];
        r.read_exact(&mut buf).map_err(|_| GeomError::Format("truncated manifold header".into()))?;
        if &buf[..4] != MANIFOLD_MAGIC {
            return Err(GeomError::Format("bad manifold magic".into()));
        }
        let version = u16::from_le_bytes([buf[4], buf[5]]);
        if version != MANIFOLD_VERSION {
            return Err(GeomError::UnsupportedVersion { found: version, expected: MANIFOLD_VERSION });
        }
        let latent_dim = u32::from_le_bytes(buf[6..10].try_into().expect("4 bytes")) as usize;
        let encoder = nn::read_mlp(r)?;
        let decoder = nn::read_mlp(r)?;
        let mut tail = [0u8; 12];
        r.read_exact(&mut tail).map_err(|_| GeomError::Format("truncated manifold report".into()))?;
        let report = TrainingReport {
            final_mse: f64::from_le_bytes(tail[..8].try_into().expect("8 bytes")),
            epochs: u32::from_le_bytes(tail[8..].try_into().expect("4 bytes")) as usize,
        };
        if encoder.output_dim() != latent_dim
            || decoder.input_dim() != latent_dim
            || decoder.output_dim() != encoder.input_dim()
        {
            return Err(GeomError::Format("encoder/decoder dims do not match the latent header".into()));
        }
        Ok(Self { encoder, decoder, latent_dim, report })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }
}
