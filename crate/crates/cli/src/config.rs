//! Per-subcommand JSON configs.

use std::path::Path;

use geomgan::eval::{EvalSpace, GridSpec};
use geomgan::gan::GanConfig;
use geomgan::manifold::AutoencoderConfig;
use geomgan::mgm::MgmConfig;
use geomgan::{GeomError, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartitionConfig {
    pub k_min: usize,
    pub k_max: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self { k_min: 1, k_max: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainGanConfig {
    pub gan: GanConfig,
    pub epochs: usize,
    /// Rows written to generated.csv after training.
    pub n_generate: usize,
}

impl Default for TrainGanConfig {
    fn default() -> Self {
        Self { gan: GanConfig::default(), epochs: 200, n_generate: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainMgmConfig {
    pub autoencoder: AutoencoderConfig,
    pub partition: PartitionConfig,
    pub mgm: MgmConfig,
    pub epochs: usize,
}

impl Default for TrainMgmConfig {
    fn default() -> Self {
        Self {
            autoencoder: AutoencoderConfig::default(),
            partition: PartitionConfig::default(),
            mgm: MgmConfig::default(),
            epochs: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub space: EvalSpace,
    /// Density grid of each mapped set; 2-D data only.
    pub kde_grid: Option<GridSpec>,
    /// Label whose per-feature means are compared before and after mapping.
    pub r2_population: Option<i64>,
}

/// Reads `path` as `T`, or the defaults when no config is given.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| GeomError::Config(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| GeomError::Config(format!("config {}: {e}", p.display())))
        }
    }
}

/// Pretty JSON defaults for each subcommand that takes a config.
pub fn documented_defaults() -> Vec<(&'static str, String)> {
    let show = |v: serde_json::Result<String>| v.unwrap_or_default();
    vec![
        ("train-ae", show(serde_json::to_string_pretty(&AutoencoderConfig::default()))),
        ("partition", show(serde_json::to_string_pretty(&PartitionConfig::default()))),
        ("train-gan", show(serde_json::to_string_pretty(&TrainGanConfig::default()))),
        ("train-mgm", show(serde_json::to_string_pretty(&TrainMgmConfig::default()))),
        ("eval", show(serde_json::to_string_pretty(&EvalConfig::default()))),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"epochs": 3, "bogus_key": 1}"#).unwrap();
        let err = load::<TrainGanConfig>(Some(&p)).unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("bogus_key"), "{err}");
    }

    #[test]
    fn partial_config_keeps_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"epochs": 3, "gan": {"batch_size": 50}}"#).unwrap();
        let c = load::<TrainGanConfig>(Some(&p)).unwrap();
        assert_eq!(c.epochs, 3);
        assert_eq!(c.gan.batch_size, 50);
        assert_eq!(c.gan.noise_dim, GanConfig::default().noise_dim);
    }
}
