//! End-to-end recipes: simulate, train, map and score, with every artifact
//! written under one output directory.
//!
//! Each recipe is a pure function of its name and seed. Reruns with the same
//! seed produce byte-identical files, so logs and reports carry no wall times.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::autodiff::Tensor;
use crate::data::digits::write_digit_idx;
use crate::data::{load_idx_images, oversample_class, pca_reduce, save_csv, simulate_mixture, Dataset, MixtureComponent, MixtureSpec, Transition};
use crate::error::{GeomError, Result};
use crate::eval::{kde_grid, nn_label_transfer, population_mean_r2, score_domain, EvalReport, GridSpec};
use crate::gan::{generate, train_mg_gan, GanConfig, WeightMode};
use crate::manifest::{config_hash, Manifest, MANIFEST_FILE};
use crate::manifold::{train_autoencoder, AutoencoderConfig};
use crate::mgm::{map_x_to_y, map_y_to_x, prepare_domain, train_mgm, Domain, MgmConfig, MgmMode};
use crate::nn::save_model;
use crate::partition::select_k_bic;
use crate::rng::{derive_seed, seeded};

pub const SCENARIOS: [&str; 4] = ["geometry-generation", "gaussian-alignment", "mnist-oversampling", "cytometry-standin"];

/// The four compared models and their artifact names.
pub const VARIANTS: [(MgmMode, &str); 4] = [
    (MgmMode::Mgm, "mgm"),
    (MgmMode::Gan, "gan"),
    (MgmMode::CycleGan, "cycle_gan"),
    (MgmMode::RandomWeights, "random_weights"),
];

/// Component means of the reference 2-D mixture.
pub const REFERENCE_MEANS: [[f64; 2]; 3] = [[0.0, 0.0], [4.0, 4.0], [8.0, 0.0]];

/// Runs scenario `name`, writing artifacts, `report.json` and `manifest.json`
/// into `out`.
pub fn reproduce(name: &str, seed: u64, out: impl AsRef<Path>) -> Result<EvalReport> {
    let out = out.as_ref();
    std::fs::create_dir_all(out)?;
    let (report, config) = match name {
        "geometry-generation" => {
            let p = GeometryParams::default();
            (run_geometry_generation(&p, seed, out)?, serde_json::to_value(&p)?)
        }
        "gaussian-alignment" => {
            let p = AlignmentParams::default();
            (run_gaussian_alignment(&p, seed, out)?, serde_json::to_value(&p)?)
        }
        "mnist-oversampling" => {
            let p = DigitsParams::default();
            (run_mnist_oversampling(&p, seed, out)?, serde_json::to_value(&p)?)
        }
        "cytometry-standin" => {
            let p = CytometryParams::default();
            (run_cytometry_standin(&p, seed, out)?, serde_json::to_value(&p)?)
        }
        _ => return Err(GeomError::Config(format!("unknown scenario {name:?}; expected one of {}", SCENARIOS.join(", ")))),
    };
    report.write(out)?;
    let mut manifest = Manifest::new(format!("reproduce {name}"), seed, &config)?;
    manifest.add_output_dir(out)?;
    manifest.write(out.join(MANIFEST_FILE))?;
    Ok(report)
}

/// The reference mixture with the given frequencies; `shift` moves one
/// component's mean.
pub fn reference_mixture(frequencies: [f64; 3], shift: Option<(usize, [f64; 2])>, n: usize, seed: u64) -> MixtureSpec {
    let components = REFERENCE_MEANS
        .iter()
        .zip(frequencies)
        .enumerate()
        .map(|(i, (m, frequency))| {
            let d = match shift {
                Some((j, d)) if j == i => d,
                _ => [0.0, 0.0],
            };
            MixtureComponent { mean: vec![m[0] + d[0], m[1] + d[1]], cov_diag: vec![1.0, 1.0], frequency }
        })
        .collect();
    MixtureSpec { components, transition_pairs: vec![], transition_jitter: 0.25, total_n: n, seed }
}

fn reference_grid() -> GridSpec {
    GridSpec { x_range: (-4.0, 12.0), y_range: (-4.0, 8.0), resolution: 64 }
}

fn write_kde(points: &Tensor, name: &str, out: &Path, report: &mut EvalReport) -> Result<()> {
    kde_grid(points, None, reference_grid())?.write_csv(out.join(name))?;
    report.kde_files.push(name.to_string());
    Ok(())
}

/// Shannon entropy (nats) of the occupancy histogram.
pub fn occupancy_entropy(assign: &[usize], k: usize) -> f64 {
    let mut counts = vec![0usize; k];
    for &a in assign {
        counts[a] += 1;
    }
    let n = assign.len() as f64;
    counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 / n).map(|p| -p * p.ln()).sum()
}

fn nearest_mean(row: &[f64], means: &[[f64; 2]]) -> usize {
    let d = |m: &[f64; 2]| (row[0] - m[0]).powi(2) + (row[1] - m[1]).powi(2);
    (0..means.len()).fold(0, |best, i| if d(&means[i]) < d(&means[best]) { i } else { best })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryParams {
    pub frequencies: [f64; 3],
    pub n: usize,
    /// Points on the segments between components 0–1 and 1–2.
    pub transition_count: usize,
    pub autoencoder: AutoencoderConfig,
    pub k_range: (usize, usize),
    pub gan: GanConfig,
    pub epochs: usize,
    pub n_generated: usize,
}

impl Default for GeometryParams {
    fn default() -> Self {
        Self {
            frequencies: [0.07, 0.21, 0.72],
            n: 2000,
            transition_count: 30,
            autoencoder: AutoencoderConfig { hidden_dims: vec![32, 2, 32], epochs: 100, ..Default::default() },
            k_range: (1, 20),
            gan: GanConfig {
                generator_hidden: vec![64, 64],
                discriminator_hidden: vec![64, 64],
                ..Default::default()
            },
            epochs: 500,
            n_generated: 2000,
        }
    }
}

/// Generation from one skewed mixture with importance and uniform weights.
///
/// Metrics: `region_entropy/<mode>` over the data partition's regions and
/// `sparse_mass/<mode>`, the share of generated points nearest the sparsest
/// component's mean, next to its input share `sparse_frequency`.
pub fn run_geometry_generation(p: &GeometryParams, seed: u64, out: &Path) -> Result<EvalReport> {
    let mut spec = reference_mixture(p.frequencies, None, p.n, derive_seed(seed, 1));
    spec.transition_pairs = vec![
        Transition { from: 0, to: 1, count: p.transition_count },
        Transition { from: 1, to: 2, count: p.transition_count },
    ];
    let data = simulate_mixture(&spec)?;
    save_csv(&data, out.join("data.csv"))?;
    let manifold = train_autoencoder(&data, &p.autoencoder, derive_seed(seed, 2))?;
    manifold.save(out.join("manifold.gmae"))?;
    let partition = select_k_bic(&manifold.encode(data.rows())?, p.k_range.0, p.k_range.1, derive_seed(seed, 3))?;
    partition.export(out.join("partition.csv"), out.join("partition.json"))?;

    let mut report = EvalReport { seed, config_hash: config_hash(p)?, ..Default::default() };
    let sparse = (0..3).min_by(|&a, &b| p.frequencies[a].total_cmp(&p.frequencies[b])).unwrap_or(0);
    let labels = data.labels().unwrap_or(&[]);
    let mixture_rows = labels.iter().filter(|&&l| l < 3).count();
    let sparse_rows = labels.iter().filter(|&&l| l == sparse as i64).count();
    report.metrics.insert("sparse_frequency".into(), sparse_rows as f64 / mixture_rows as f64);
    report.metrics.insert("k".into(), partition.k() as f64);
    write_kde(data.rows(), "kde_data.csv", out, &mut report)?;

    for (mode, name) in [(WeightMode::Importance, "importance"), (WeightMode::Uniform, "uniform")] {
        let cfg = GanConfig { weight_mode: mode, ..p.gan.clone() };
        let (gen, disc, log) = train_mg_gan(&data, &manifold, &partition, &cfg, p.epochs, derive_seed(seed, 4))?;
        save_model(&gen, out.join(format!("generator_{name}.gmgn")))?;
        save_model(&disc, out.join(format!("discriminator_{name}.gmgn")))?;
        log.write_csv(out.join(format!("train_log_{name}.csv")))?;
        let samples = generate(&gen, p.n_generated, derive_seed(seed, 5))?;
        save_csv(&Dataset::unlabeled(samples.clone())?, out.join(format!("generated_{name}.csv")))?;
        let regions = partition.assign_region(&manifold.encode(&samples)?)?;
        report.metrics.insert(format!("region_entropy/{name}"), occupancy_entropy(&regions, partition.k()));
        let near = samples.iter_rows().filter(|r| nearest_mean(r, &REFERENCE_MEANS) == sparse).count();
        report.metrics.insert(format!("sparse_mass/{name}"), near as f64 / samples.rows() as f64);
        write_kde(&samples, &format!("kde_{name}.csv"), out, &mut report)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentParams {
    pub frequencies_x: [f64; 3],
    pub frequencies_y: [f64; 3],
    /// Component of domain Y whose mean is displaced, and by how much.
    pub shift: (usize, [f64; 2]),
    pub n: usize,
    pub autoencoder: AutoencoderConfig,
    pub k_range: (usize, usize),
    pub mgm: MgmConfig,
    pub epochs: usize,
}

impl Default for AlignmentParams {
    fn default() -> Self {
        Self {
            frequencies_x: [0.07, 0.21, 0.72],
            frequencies_y: [0.72, 0.07, 0.21],
            shift: (1, [1.5, 0.0]),
            n: 1500,
            autoencoder: AutoencoderConfig { hidden_dims: vec![32, 2, 32], epochs: 100, ..Default::default() },
            k_range: (1, 20),
            mgm: MgmConfig {
                generator_hidden: vec![64, 16, 64],
                discriminator_hidden: vec![64, 64],
                ..Default::default()
            },
            epochs: 150,
        }
    }
}

/// Trains all four variants on the prepared domains and scores label transfer
/// in both directions. Returns the mapped rows per variant.
fn run_variants(
    x: &Dataset,
    y: &Dataset,
    dx: &Domain,
    dy: &Domain,
    base: &MgmConfig,
    epochs: usize,
    seed: u64,
    out: &Path,
    report: &mut EvalReport,
) -> Result<BTreeMap<&'static str, (Tensor, Tensor)>> {
    let truth_x = x.labels().ok_or_else(|| GeomError::Config("domain x needs labels for scoring".into()))?;
    let truth_y = y.labels().ok_or_else(|| GeomError::Config("domain y needs labels for scoring".into()))?;
    let mut mapped = BTreeMap::new();
    for (mode, name) in VARIANTS {
        let cfg = MgmConfig { mode, ..base.clone() };
        let (model, log) = train_mgm(x, y, dx.clone(), dy.clone(), &cfg, epochs, derive_seed(seed, 50))?;
        let dir = out.join(name);
        model.save(dir.join("model"))?;
        log.write_csv(dir.join("train_log.csv"))?;
        let xy = map_x_to_y(&model, x.rows())?;
        let yx = map_y_to_x(&model, y.rows())?;
        report.domains.insert(format!("{name}/x_to_y"), score_domain(&nn_label_transfer(&xy, y)?, truth_x)?);
        report.domains.insert(format!("{name}/y_to_x"), score_domain(&nn_label_transfer(&yx, x)?, truth_y)?);
        let s = &report.domains[&format!("{name}/x_to_y")].macro_f + report.domains[&format!("{name}/y_to_x")].macro_f;
        report.metrics.insert(format!("mean_macro_f/{name}"), s / 2.0);
        log::info!("{name}: mean macro F {:.3}", s / 2.0);
        mapped.insert(name, (xy, yx));
    }
    Ok(mapped)
}

fn prepare_pair(
    x: &Dataset,
    y: &Dataset,
    ae: &AutoencoderConfig,
    k_range: (usize, usize),
    seed: u64,
    report: &mut EvalReport,
) -> Result<(Domain, Domain)> {
    let dx = prepare_domain(x, ae, k_range, derive_seed(seed, 10))?;
    let dy = prepare_domain(y, ae, k_range, derive_seed(seed, 11))?;
    report.metrics.insert("k/x".into(), dx.partition.k() as f64);
    report.metrics.insert("k/y".into(), dy.partition.k() as f64);
    Ok((dx, dy))
}

/// Two skewed mixtures sharing geometry up to one displaced component.
/// Metrics include `mean_macro_f/<variant>` over both mapping directions.
pub fn run_gaussian_alignment(p: &AlignmentParams, seed: u64, out: &Path) -> Result<EvalReport> {
    let x = simulate_mixture(&reference_mixture(p.frequencies_x, None, p.n, derive_seed(seed, 1)))?;
    let y = simulate_mixture(&reference_mixture(p.frequencies_y, Some(p.shift), p.n, derive_seed(seed, 2)))?;
    save_csv(&x, out.join("x.csv"))?;
    save_csv(&y, out.join("y.csv"))?;
    let mut report = EvalReport { seed, config_hash: config_hash(p)?, ..Default::default() };
    let (dx, dy) = prepare_pair(&x, &y, &p.autoencoder, p.k_range, seed, &mut report)?;
    write_kde(x.rows(), "kde_x.csv", out, &mut report)?;
    write_kde(y.rows(), "kde_y.csv", out, &mut report)?;
    let mapped = run_variants(&x, &y, &dx, &dy, &p.mgm, p.epochs, seed, out, &mut report)?;
    for (name, (xy, _)) in &mapped {
        save_csv(&Dataset::unlabeled(xy.clone())?, out.join(name).join("mapped_x_to_y.csv"))?;
        write_kde(xy, &format!("kde_{name}_x_to_y.csv"), out, &mut report)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigitsParams {
    /// Rows of the oversampled digit per domain.
    pub oversampled_count: usize,
    /// Rows of every other digit per domain.
    pub others_count: usize,
    pub pca_dims: usize,
    pub autoencoder: AutoencoderConfig,
    pub k_range: (usize, usize),
    pub mgm: MgmConfig,
    pub epochs: usize,
}

impl Default for DigitsParams {
    fn default() -> Self {
        // 10000:1000 scaled to at most 2000 rows per domain
        Self {
            oversampled_count: 1053,
            others_count: 105,
            pca_dims: 50,
            autoencoder: AutoencoderConfig { hidden_dims: vec![64, 10, 64], epochs: 100, ..Default::default() },
            k_range: (1, 20),
            mgm: MgmConfig {
                generator_hidden: vec![128, 32, 128],
                discriminator_hidden: vec![128, 64],
                ..Default::default()
            },
            epochs: 150,
        }
    }
}

/// Procedural digit images written as IDX, loaded back, and resampled so
/// domain X oversamples zeros and domain Y oversamples ones. Both domains are
/// projected with one PCA fitted on their union, so the identity map is the
/// correct alignment.
///
/// Metrics add `zeros_to_zeros/<variant>` (X zeros labeled zero after
/// mapping) and `ones_to_ones/<variant>`.
pub fn run_mnist_oversampling(p: &DigitsParams, seed: u64, out: &Path) -> Result<EvalReport> {
    let per_class = p.oversampled_count.max(p.others_count);
    let mut domains = Vec::new();
    for (i, digit) in [0i64, 1].into_iter().enumerate() {
        let dir = out.join(format!("digits_{}", ["x", "y"][i]));
        let (images, labels) = write_digit_idx(&dir, per_class, derive_seed(seed, 1 + i as u64))?;
        let raw = load_idx_images(images, labels)?;
        domains.push(oversample_class(&raw, digit, p.oversampled_count, p.others_count, derive_seed(seed, 3 + i as u64))?);
    }
    let pooled = Dataset::new(domains[0].rows().vstack(domains[1].rows())?, None, None, "pooled digits")?;
    let (_, pca) = pca_reduce(&pooled, p.pca_dims)?;
    let project = |d: &Dataset| -> Result<Dataset> { d.with_rows(pca.transform(d.rows())?) };
    let (x, y) = (project(&domains[0])?, project(&domains[1])?);
    save_csv(&x, out.join("x.csv"))?;
    save_csv(&y, out.join("y.csv"))?;

    let mut report = EvalReport { seed, config_hash: config_hash(p)?, ..Default::default() };
    let (dx, dy) = prepare_pair(&x, &y, &p.autoencoder, p.k_range, seed, &mut report)?;
    run_variants(&x, &y, &dx, &dy, &p.mgm, p.epochs, seed, out, &mut report)?;
    for (_, name) in VARIANTS {
        for (key, digit, metric) in [("x_to_y", 0i64, "zeros_to_zeros"), ("y_to_x", 1, "ones_to_ones")] {
            let c = &report.domains[&format!("{name}/{key}")].confusion;
            let row = c.classes.iter().position(|&k| k == digit);
            let share = row.map_or(0.0, |r| {
                let total: usize = c.counts[r].iter().sum();
                c.counts[r][r] as f64 / total.max(1) as f64
            });
            report.metrics.insert(format!("{metric}/{name}"), share);
        }
    }
    Ok(report)
}

/// Population labels of the cytometry stand-in.
pub const SHIFTED_POPULATION: i64 = 0;
pub const SKEWED_POPULATION: i64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CytometryParams {
    pub features: usize,
    pub frequencies_x: [f64; 4],
    pub frequencies_y: [f64; 4],
    /// Spread of population means around the origin, per feature.
    pub mean_spread: f64,
    /// Largest per-feature displacement of the shifted population in Y.
    pub max_shift: f64,
    pub variance: f64,
    pub n: usize,
    pub autoencoder: AutoencoderConfig,
    pub k_range: (usize, usize),
    pub mgm: MgmConfig,
    pub epochs: usize,
}

impl Default for CytometryParams {
    fn default() -> Self {
        Self {
            features: 10,
            frequencies_x: [0.20, 0.02, 0.48, 0.30],
            frequencies_y: [0.20, 0.45, 0.15, 0.20],
            mean_spread: 2.0,
            max_shift: 1.5,
            variance: 0.25,
            n: 1500,
            autoencoder: AutoencoderConfig { hidden_dims: vec![64, 4, 64], epochs: 100, ..Default::default() },
            k_range: (1, 20),
            mgm: MgmConfig {
                generator_hidden: vec![64, 16, 64],
                discriminator_hidden: vec![64, 64],
                ..Default::default()
            },
            epochs: 150,
        }
    }
}

/// Population means and the shift of the shifted population. Drawn from a
/// fixed stream so every run seed sees the same geometry.
pub fn cytometry_geometry(p: &CytometryParams) -> (Vec<Vec<f64>>, Vec<f64>) {
    use rand::Rng;
    let mut rng = seeded(0x5eed_c470);
    let means = (0..4).map(|_| (0..p.features).map(|_| rng.random_range(-p.mean_spread..p.mean_spread)).collect()).collect();
    let shift = (0..p.features).map(|_| rng.random_range(-p.max_shift..p.max_shift)).collect();
    (means, shift)
}

fn cytometry_spec(p: &CytometryParams, frequencies: [f64; 4], shifted: bool, seed: u64) -> MixtureSpec {
    let (means, shift) = cytometry_geometry(p);
    let components = means
        .into_iter()
        .zip(frequencies)
        .enumerate()
        .map(|(i, (mut mean, frequency))| {
            if shifted && i as i64 == SHIFTED_POPULATION {
                mean.iter_mut().zip(&shift).for_each(|(m, s)| *m += s);
            }
            MixtureComponent { mean, cov_diag: vec![p.variance; p.features], frequency }
        })
        .collect();
    MixtureSpec { components, transition_pairs: vec![], transition_jitter: 0.0, total_n: p.n, seed }
}

/// Two samples of four populations. Population 0 carries a per-feature batch
/// shift in Y; population 1 is unshifted but far more frequent in Y.
///
/// The population gate is the simulated membership label: the simulator knows
/// which population each row came from, so no marker thresholds are needed.
/// Metrics: `skewed_f/<variant>/<direction>` is the F-score of population 1;
/// `r_squared["shifted"]` compares per-feature means of population 0.
pub fn run_cytometry_standin(p: &CytometryParams, seed: u64, out: &Path) -> Result<EvalReport> {
    let names: Vec<String> = (0..p.features).map(|i| format!("marker{i}")).collect();
    let named = |d: Dataset| -> Result<Dataset> {
        Dataset::new(d.rows().clone(), d.labels().map(|l| l.to_vec()), Some(names.clone()), d.provenance.clone())
    };
    let x = named(simulate_mixture(&cytometry_spec(p, p.frequencies_x, false, derive_seed(seed, 1)))?)?;
    let y = named(simulate_mixture(&cytometry_spec(p, p.frequencies_y, true, derive_seed(seed, 2)))?)?;
    save_csv(&x, out.join("x.csv"))?;
    save_csv(&y, out.join("y.csv"))?;
    let mut report = EvalReport { seed, config_hash: config_hash(p)?, ..Default::default() };
    let (dx, dy) = prepare_pair(&x, &y, &p.autoencoder, p.k_range, seed, &mut report)?;
    let mapped = run_variants(&x, &y, &dx, &dy, &p.mgm, p.epochs, seed, out, &mut report)?;
    let gate = |_: &[f64], label: Option<i64>| label == Some(SHIFTED_POPULATION);
    for (name, (xy, _)) in &mapped {
        report.r_squared.insert(format!("shifted/{name}"), population_mean_r2(&x, xy, &y, gate)?);
        for dir in ["x_to_y", "y_to_x"] {
            let f = report.domains[&format!("{name}/{dir}")].f_scores.get(&SKEWED_POPULATION).copied().unwrap_or(0.0);
            report.metrics.insert(format!("skewed_f/{name}/{dir}"), f);
        }
    }
    Ok(report)
}
