use std::path::{Path, PathBuf};

use geomgan::data::{load_csv, save_csv, simulate_mixture, Dataset, MixtureSpec};
use geomgan::eval::{kde_grid, population_mean_r2, score_domain, transfer_labels, EvalReport};
use geomgan::gan::{generate, train_mg_gan};
use geomgan::manifest::{config_hash, Manifest, MANIFEST_FILE};
use geomgan::manifold::{train_autoencoder, ManifoldModel};
use geomgan::mgm::{map_x_to_y, map_y_to_x, prepare_domain, train_mgm, MgmModel};
use geomgan::nn::save_model;
use geomgan::partition::{select_k_bic, Partition};
use geomgan::scenarios::reproduce;
use geomgan::{GeomError, Result};

use crate::config::{load, EvalConfig, PartitionConfig, TrainGanConfig, TrainMgmConfig};
use crate::{Cli, Command, Direction};

/// Machine-readable error category for `--json-errors`.
pub fn kind(e: &GeomError) -> &'static str {
    match e {
        GeomError::Dimension { .. } => "dimension",
        GeomError::DegenerateWeights(_) => "degenerate_weights",
        GeomError::Contract(_) => "contract",
        GeomError::Config(_) => "config",
        GeomError::Divergence { .. } => "divergence",
        GeomError::Format(_) | GeomError::UnsupportedVersion { .. } => "format",
        GeomError::Data { .. } | GeomError::Csv(_) => "data",
        GeomError::Json(_) => "json",
        GeomError::Io(_) => "io",
    }
}

fn require_exists(paths: &[&Path]) -> Result<()> {
    for p in paths {
        if !p.exists() {
            return Err(GeomError::Config(format!("input {} does not exist", p.display())));
        }
    }
    Ok(())
}

fn rejects_config(cli: &Cli, name: &str) -> Result<()> {
    match &cli.config {
        Some(_) => Err(GeomError::Config(format!("{name} takes no --config"))),
        None => Ok(()),
    }
}

fn partition_files(dir: &Path) -> (PathBuf, PathBuf) {
    (dir.join("partition.csv"), dir.join("partition.json"))
}

fn finish(out: &Path, mut manifest: Manifest, inputs: &[&Path]) -> Result<()> {
    for p in inputs {
        if p.is_dir() {
            for f in geomgan::manifest::files_under(p)? {
                manifest.add_input(f)?;
            }
        } else {
            manifest.add_input(p)?;
        }
    }
    manifest.add_output_dir(out)?;
    manifest.write(out.join(MANIFEST_FILE))
}

pub fn run(cli: Cli) -> Result<()> {
    let out = cli.out.clone().ok_or_else(|| GeomError::Config("--out is required".into()))?;
    let seed = cli.seed.unwrap_or(0);
    let config_path = cli.config.as_deref();
    match &cli.command {
        Command::Simulate => {
            let path = config_path.ok_or_else(|| GeomError::Config("simulate needs --config with a mixture spec".into()))?;
            require_exists(&[path])?;
            let mut spec: MixtureSpec = serde_json::from_str(&std::fs::read_to_string(path)?)
                .map_err(|e| GeomError::Config(format!("config {}: {e}", path.display())))?;
            if let Some(s) = cli.seed {
                spec.seed = s;
            }
            let d = simulate_mixture(&spec)?;
            std::fs::create_dir_all(&out)?;
            save_csv(&d, out.join("data.csv"))?;
            finish(&out, Manifest::new("simulate", spec.seed, &spec)?, &[path])
        }
        Command::TrainAe { data, label_column } => {
            require_exists(&[data])?;
            let cfg: geomgan::manifold::AutoencoderConfig = load(config_path)?;
            let d = load_csv(data, label_column.as_deref())?;
            let m = train_autoencoder(&d, &cfg, seed)?;
            std::fs::create_dir_all(&out)?;
            m.save(out.join("manifold.gmae"))?;
            save_csv(&Dataset::unlabeled(m.encode(d.rows())?)?, out.join("latents.csv"))?;
            std::fs::write(out.join("training.json"), serde_json::to_string_pretty(&m.report)?)?;
            finish(&out, Manifest::new("train-ae", seed, &cfg)?, &[data])
        }
        Command::Partition { data, manifold, label_column } => {
            require_exists(&[data, manifold])?;
            let cfg: PartitionConfig = load(config_path)?;
            let d = load_csv(data, label_column.as_deref())?;
            let m = ManifoldModel::load(manifold)?;
            let latents = m.encode(d.rows())?;
            let p = select_k_bic(&latents, cfg.k_min, cfg.k_max, seed)?;
            std::fs::create_dir_all(&out)?;
            let (c, j) = partition_files(&out);
            p.export(c, j)?;
            let w = p.compute_weights(&latents)?;
            let mut wr = csv::Writer::from_path(out.join("weights.csv")).map_err(GeomError::from)?;
            wr.write_record(["row", "region", "weight"]).map_err(GeomError::from)?;
            for (i, (r, v)) in p.assign_region(&latents)?.iter().zip(&w.weights).enumerate() {
                wr.write_record([i.to_string(), r.to_string(), v.to_string()]).map_err(GeomError::from)?;
            }
            wr.flush()?;
            finish(&out, Manifest::new("partition", seed, &cfg)?, &[data, manifold])
        }
        Command::TrainGan { data, manifold, partition, label_column } => {
            require_exists(&[data, manifold, partition])?;
            let cfg: TrainGanConfig = load(config_path)?;
            let d = load_csv(data, label_column.as_deref())?;
            let m = ManifoldModel::load(manifold)?;
            let (c, j) = partition_files(partition);
            let p = Partition::import(c, j)?;
            let (gen, disc, log) = train_mg_gan(&d, &m, &p, &cfg.gan, cfg.epochs, seed)?;
            std::fs::create_dir_all(&out)?;
            save_model(&gen, out.join("generator.gmgn"))?;
            save_model(&disc, out.join("discriminator.gmgn"))?;
            log.write_csv(out.join("train_log.csv"))?;
            let samples = generate(&gen, cfg.n_generate, seed)?;
            save_csv(&Dataset::unlabeled(samples)?, out.join("generated.csv"))?;
            finish(&out, Manifest::new("train-gan", seed, &cfg)?, &[data, manifold, partition])
        }
        Command::TrainMgm { domain_x, domain_y, label_column } => {
            require_exists(&[domain_x, domain_y])?;
            let cfg: TrainMgmConfig = load(config_path)?;
            cfg.mgm.validate()?;
            let x = load_csv(domain_x, label_column.as_deref())?;
            let y = load_csv(domain_y, label_column.as_deref())?;
            let k = (cfg.partition.k_min, cfg.partition.k_max);
            let dx = prepare_domain(&x, &cfg.autoencoder, k, geomgan::rng::derive_seed(seed, 10))?;
            let dy = prepare_domain(&y, &cfg.autoencoder, k, geomgan::rng::derive_seed(seed, 11))?;
            let (model, log) = train_mgm(&x, &y, dx, dy, &cfg.mgm, cfg.epochs, seed)?;
            std::fs::create_dir_all(&out)?;
            model.save(out.join("model"))?;
            log.write_csv(out.join("train_log.csv"))?;
            finish(&out, Manifest::new("train-mgm", seed, &cfg)?, &[domain_x, domain_y])
        }
        Command::Map { model, data, direction, label_column } => {
            rejects_config(&cli, "map")?;
            require_exists(&[model, data])?;
            let m = MgmModel::load(model)?;
            let d = load_csv(data, label_column.as_deref())?;
            let mapped = match direction {
                Direction::XToY => map_x_to_y(&m, d.rows())?,
                Direction::YToX => map_y_to_x(&m, d.rows())?,
            };
            std::fs::create_dir_all(&out)?;
            let labels = d.labels().map(|l| l.to_vec());
            save_csv(&Dataset::new(mapped, labels, None, "mapped")?, out.join("mapped.csv"))?;
            let settings = serde_json::json!({ "direction": format!("{direction:?}") });
            finish(&out, Manifest::new("map", seed, &settings)?, &[model, data])
        }
        Command::Eval { model, domain_x, domain_y, label_column } => {
            require_exists(&[model, domain_x, domain_y])?;
            let cfg: EvalConfig = load(config_path)?;
            let m = MgmModel::load(model)?;
            let x = load_csv(domain_x, Some(label_column))?;
            let y = load_csv(domain_y, Some(label_column))?;
            let xy = map_x_to_y(&m, x.rows())?;
            let yx = map_y_to_x(&m, y.rows())?;
            let mut report = EvalReport { seed, config_hash: config_hash(&cfg)?, ..Default::default() };
            let (tx, ty) = (x.labels().unwrap_or(&[]), y.labels().unwrap_or(&[]));
            let pxy = transfer_labels(&xy, &y, cfg.space, &m.y.manifold)?;
            let pyx = transfer_labels(&yx, &x, cfg.space, &m.x.manifold)?;
            report.domains.insert("model/x_to_y".into(), score_domain(&pxy, tx)?);
            report.domains.insert("model/y_to_x".into(), score_domain(&pyx, ty)?);
            std::fs::create_dir_all(&out)?;
            if let Some(pop) = cfg.r2_population {
                let gate = |_: &[f64], l: Option<i64>| l == Some(pop);
                report.r_squared.insert(format!("population_{pop}/x_to_y"), population_mean_r2(&x, &xy, &y, gate)?);
                report.r_squared.insert(format!("population_{pop}/y_to_x"), population_mean_r2(&y, &yx, &x, gate)?);
            }
            if let Some(grid) = cfg.kde_grid {
                for (rows, name) in [(&xy, "kde_x_to_y.csv"), (&yx, "kde_y_to_x.csv")] {
                    kde_grid(rows, None, grid)?.write_csv(out.join(name))?;
                    report.kde_files.push(name.into());
                }
            }
            report.write(&out)?;
            finish(&out, Manifest::new("eval", seed, &cfg)?, &[model, domain_x, domain_y])
        }
        Command::Reproduce { scenario } => {
            rejects_config(&cli, "reproduce")?;
            let report = reproduce(scenario, seed, &out)?;
            for (k, v) in &report.metrics {
                println!("{k}\t{v:.4}");
            }
            Ok(())
        }
    }
}
