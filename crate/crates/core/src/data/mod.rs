//! Dataset container, simulators and ingestion.

mod csv_io;
pub mod digits;
mod idx;
mod mixture;
mod pca;

pub use csv_io::{load_csv, save_csv};
pub use idx::{load_idx_images, write_idx_images, write_idx_labels, IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC};
pub use mixture::{simulate_mixture, MixtureComponent, MixtureSpec, Transition};
pub use pca::{pca_reduce, Pca};

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::autodiff::Tensor;
use crate::error::{GeomError, Result};
use crate::rng::seeded;

/// Row samples with optional integer labels and feature names.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Tensor,
    labels: Option<Vec<i64>>,
    feature_names: Option<Vec<String>>,
    pub provenance: String,
}

impl Dataset {
    /// Rejects non-finite rows (naming the first bad row) and label/name
    /// length mismatches.
    pub fn new(
        rows: Tensor,
        labels: Option<Vec<i64>>,
        feature_names: Option<Vec<String>>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        for (i, row) in rows.iter_rows().enumerate() {
            if let Some(c) = row.iter().position(|v| !v.is_finite()) {
                return Err(GeomError::Data { row: i, col: c, msg: "non-finite value".into() });
            }
        }
        if let Some(l) = &labels {
            if l.len() != rows.rows() {
                return Err(GeomError::Dimension { op: "labels", left: rows.shape(), right: (l.len(), 1) });
            }
        }
        if let Some(f) = &feature_names {
            if f.len() != rows.cols() {
                return Err(GeomError::Dimension { op: "feature names", left: rows.shape(), right: (1, f.len()) });
            }
        }
        Ok(Self { rows, labels, feature_names, provenance: provenance.into() })
    }

    pub fn unlabeled(rows: Tensor) -> Result<Self> {
        Self::new(rows, None, None, "in-memory")
    }

    pub fn rows(&self) -> &Tensor {
        &self.rows
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn len(&self) -> usize {
        self.rows.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.cols()
    }

    /// Subset by row index, labels carried along.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            rows: self.rows.select_rows(indices),
            labels: self.labels.as_ref().map(|l| indices.iter().map(|&i| l[i]).collect()),
            feature_names: self.feature_names.clone(),
            provenance: self.provenance.clone(),
        }
    }

    /// Same labels and names, new row values.
    pub fn with_rows(&self, rows: Tensor) -> Result<Self> {
        Self::new(rows, self.labels.clone(), self.feature_names.clone(), self.provenance.clone())
    }

    /// Row indices per label, in ascending label order.
    pub fn class_indices(&self) -> Result<BTreeMap<i64, Vec<usize>>> {
        let labels = self.labels.as_ref().ok_or_else(|| GeomError::Config("dataset has no labels".into()))?;
        let mut map: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, &l) in labels.iter().enumerate() {
            map.entry(l).or_default().push(i);
        }
        Ok(map)
    }
}

/// Resamples every class: `target_count` rows of `class_id`, `others_count`
/// rows of each other class. Draws without replacement up to the class size,
/// then with replacement. Output rows are shuffled.
pub fn oversample_class(
    d: &Dataset,
    class_id: i64,
    target_count: usize,
    others_count: usize,
    seed: u64,
) -> Result<Dataset> {
    let classes = d.class_indices()?;
    if !classes.contains_key(&class_id) {
        return Err(GeomError::Config(format!("class {class_id} not present in dataset")));
    }
    let mut rng = seeded(seed);
    let mut picked = Vec::new();
    for (&label, members) in &classes {
        let want = if label == class_id { target_count } else { others_count };
        let mut pool = members.clone();
        pool.shuffle(&mut rng);
        let take = want.min(pool.len());
        picked.extend_from_slice(&pool[..take]);
        for _ in take..want {
            picked.push(pool[rng.random_range(0..pool.len())]);
        }
    }
    picked.shuffle(&mut rng);
    let mut out = d.select(&picked);
    out.provenance = format!("{} | oversample class {class_id}->{target_count}, others->{others_count}", d.provenance);
    Ok(out)
}

/// Random subset of at most `n` rows (all rows, shuffled, when `n >= len`).
pub fn subsample(d: &Dataset, n: usize, seed: u64) -> Dataset {
    let mut idx: Vec<usize> = (0..d.len()).collect();
    idx.shuffle(&mut seeded(seed));
    idx.truncate(n);
    d.select(&idx)
}
