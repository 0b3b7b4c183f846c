//! Voronoi partitions of a latent space and the density-balancing weights
//! derived from them.
//!
//! Every point gets weight `1 / n_r`, where `n_r` is the number of points of
//! the same sample that fall in its region, so each occupied region carries
//! total weight exactly one no matter how densely it is sampled.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::autodiff::Tensor;
use crate::error::{GeomError, Result};
use crate::rng::{derive_seed, seeded};

pub const DEFAULT_MAX_ITER: usize = 300;
pub const DEFAULT_RESTARTS: usize = 4;

/// k centroids in latent space with the region counts of the sample that built them.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    centroids: Tensor,
    region_counts: Vec<usize>,
    pub seed: u64,
    /// `(k, BIC)` for every k evaluated during selection; empty for a plain k-means fit.
    pub bic_curve: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub partition_id: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionSidecar {
    k: usize,
    counts: Vec<usize>,
    seed: u64,
    bic_curve: Vec<(usize, f64)>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid; ties go to the lowest index.
fn nearest(row: &[f64], centroids: &Tensor) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter_rows().enumerate() {
        let d = sq_dist(row, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

pub fn distinct_rows(x: &Tensor) -> usize {
    let mut keys: Vec<Vec<u64>> = x.iter_rows().map(|r| r.iter().map(|v| (v + 0.0).to_bits()).collect()).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

/// Region index per row given a count vector of length `k`.
pub fn counts_of(assign: &[usize], k: usize) -> Vec<usize> {
    let mut counts = vec![0; k];
    for &a in assign {
        counts[a] += 1;
    }
    counts
}

/// `w_i = 1 / (number of rows sharing row i's region)`.
pub fn weights_from_assignment(assign: &[usize], k: usize) -> Vec<f64> {
    let counts = counts_of(assign, k);
    assign.iter().map(|&a| 1.0 / counts[a] as f64).collect()
}

fn kmeans_plus_plus<R: Rng>(x: &Tensor, k: usize, rng: &mut R) -> Tensor {
    let n = x.rows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = x.iter_rows().map(|r| sq_dist(r, x.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            // fall back to the farthest point on rounding at the tail
            if d2[pick] == 0.0 {
                pick = (0..n).max_by(|&a, &b| d2[a].total_cmp(&d2[b])).expect("nonempty");
            }
            pick
        } else {
            break;
        };
        chosen.push(next);
        for (i, r) in x.iter_rows().enumerate() {
            d2[i] = d2[i].min(sq_dist(r, x.row(next)));
        }
    }
    x.select_rows(&chosen)
}

/// Lloyd's algorithm from k-means++ seeding.
///
/// Stops when assignments are stable or after `max_iter` iterations. Empty
/// clusters are re-seeded at the point farthest from its current centroid.
pub fn kmeans(latents: &Tensor, k: usize, seed: u64, max_iter: usize) -> Result<Partition> {
    let n = latents.rows();
    if k == 0 {
        return Err(GeomError::Config("k must be at least 1".into()));
    }
    let distinct = distinct_rows(latents);
    if k > distinct {
        return Err(GeomError::Config(format!("k = {k} exceeds the {distinct} distinct rows")));
    }
    let d = latents.cols();
    let mut rng = seeded(seed);
    let mut centroids = kmeans_plus_plus(latents, k, &mut rng);
    let mut assign = vec![usize::MAX; n];

    for _ in 0..max_iter.max(1) {
        let mut changed = false;
        for (i, row) in latents.iter_rows().enumerate() {
            let (j, _) = nearest(row, &centroids);
            if assign[i] != j {
                assign[i] = j;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = Tensor::zeros(k, d);
        let counts = counts_of(&assign, k);
        for (row, &a) in latents.iter_rows().zip(&assign) {
            for (s, v) in sums.row_mut(a).iter_mut().zip(row) {
                *s += v;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                for (c, s) in centroids.row_mut(j).iter_mut().zip(sums.row(j)) {
                    *c = s / counts[j] as f64;
                }
            } else {
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = sq_dist(latents.row(a), centroids.row(assign[a]));
                        let db = sq_dist(latents.row(b), centroids.row(assign[b]));
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .expect("nonempty");
                centroids.row_mut(j).copy_from_slice(latents.row(far));
                assign[far] = j;
            }
        }
    }
    Partition::from_centroids(centroids, latents, seed)
}

/// Best-SSE fit over `restarts` independent seedings.
pub fn kmeans_restarts(latents: &Tensor, k: usize, seed: u64, max_iter: usize, restarts: usize) -> Result<Partition> {
    let mut best: Option<(f64, Partition)> = None;
    for r in 0..restarts.max(1) {
        let mut p = kmeans(latents, k, derive_seed(seed, r as u64), max_iter)?;
        p.seed = seed;
        let sse = p.sse(latents)?;
        if best.as_ref().is_none_or(|(b, _)| sse < *b) {
            best = Some((sse, p));
        }
    }
    Ok(best.expect("at least one restart").1)
}

/// `k (d + 1) ln N - 2 ln L` for a hard-assignment spherical Gaussian mixture
/// with one shared variance (MLE from the within-cluster SSE) and mixing
/// weights `n_j / N`.
pub fn bic(latents: &Tensor, p: &Partition) -> Result<f64> {
    let (n, d) = latents.shape();
    let assign = p.assign_region(latents)?;
    let counts = counts_of(&assign, p.k());
    let sse = p.sse(latents)?;
    let (nf, df) = (n as f64, d as f64);
    let var = (sse / (nf * df)).max(1e-12);
    let mix: f64 = counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 * (c as f64 / nf).ln()).sum();
    let log_lik = mix - 0.5 * nf * df * (2.0 * std::f64::consts::PI * var).ln() - 0.5 * nf * df;
    Ok(p.k() as f64 * (df + 1.0) * nf.ln() - 2.0 * log_lik)
}

/// Fits k-means for each k in `k_min..=k_max` and keeps the lowest BIC;
/// ties go to the smaller k.
pub fn select_k_bic(latents: &Tensor, k_min: usize, k_max: usize, seed: u64) -> Result<Partition> {
    let n = latents.rows();
    if k_min == 0 || k_min > k_max {
        return Err(GeomError::Config(format!("invalid k range [{k_min}, {k_max}]")));
    }
    if k_max > 1 && k_max > n / 2 {
        return Err(GeomError::Config(format!("k_max = {k_max} exceeds half the {n} rows")));
    }
    let mut curve = Vec::new();
    let mut best: Option<(f64, Partition)> = None;
    for k in k_min..=k_max {
        let p = kmeans_restarts(latents, k, derive_seed(seed, k as u64), DEFAULT_MAX_ITER, DEFAULT_RESTARTS)?;
        let b = bic(latents, &p)?;
        curve.push((k, b));
        if best.as_ref().is_none_or(|(bb, _)| b < *bb) {
            best = Some((b, p));
        }
    }
    let (_, mut p) = best.expect("nonempty range");
    p.seed = seed;
    p.bic_curve = curve;
    Ok(p)
}

impl Partition {
    /// Partition with counts taken from assigning `latents` to `centroids`.
    pub fn from_centroids(centroids: Tensor, latents: &Tensor, seed: u64) -> Result<Self> {
        if !centroids.is_finite() || centroids.rows() == 0 {
            return Err(GeomError::Config("centroids must be finite and nonempty".into()));
        }
        let mut p = Self { region_counts: vec![0; centroids.rows()], centroids, seed, bic_curve: Vec::new() };
        let assign = p.assign_region(latents)?;
        p.region_counts = counts_of(&assign, p.k());
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.centroids.rows()
    }

    pub fn centroids(&self) -> &Tensor {
        &self.centroids
    }

    pub fn region_counts(&self) -> &[usize] {
        &self.region_counts
    }

    /// Short content hash identifying this partition.
    pub fn id(&self) -> String {
        let digest = Sha256::digest(self.centroids.to_le_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn assign_region(&self, latents: &Tensor) -> Result<Vec<usize>> {
        if latents.rows() > 0 && latents.cols() != self.centroids.cols() {
            return Err(GeomError::Dimension { op: "assign_region", left: latents.shape(), right: self.centroids.shape() });
        }
        Ok(latents.iter_rows().map(|r| nearest(r, &self.centroids).0).collect())
    }

    /// Importance weights for `latents`, counting region membership within
    /// these rows. Regions absent from the rows contribute nothing.
    pub fn compute_weights(&self, latents: &Tensor) -> Result<WeightVector> {
        let assign = self.assign_region(latents)?;
        Ok(WeightVector { weights: weights_from_assignment(&assign, self.k()), partition_id: self.id() })
    }

    pub fn sse(&self, latents: &Tensor) -> Result<f64> {
        let assign = self.assign_region(latents)?;
        Ok(latents.iter_rows().zip(&assign).map(|(r, &a)| sq_dist(r, self.centroids.row(a))).sum())
    }

    pub fn export(&self, csv_path: impl AsRef<Path>, json_path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(csv_path)?;
        w.write_record((0..self.centroids.cols()).map(|i| format!("c{i}")))?;
        for row in self.centroids.iter_rows() {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        let sidecar = PartitionSidecar {
            k: self.k(),
            counts: self.region_counts.clone(),
            seed: self.seed,
            bic_curve: self.bic_curve.clone(),
        };
        std::fs::write(json_path, serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }

    pub fn import(csv_path: impl AsRef<Path>, json_path: impl AsRef<Path>) -> Result<Self> {
        let mut r = csv::Reader::from_path(csv_path)?;
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .enumerate()
                .map(|(c, s)| s.parse::<f64>().map_err(|_| GeomError::Data { row: i, col: c, msg: format!("'{s}'") }))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let centroids = Tensor::from_rows(&rows)?;
        let sidecar: PartitionSidecar = serde_json::from_str(&std::fs::read_to_string(json_path)?)?;
        if sidecar.k != centroids.rows() || sidecar.counts.len() != sidecar.k {
            return Err(GeomError::Format("partition sidecar disagrees with centroid file".into()));
        }
        Ok(Self { centroids, region_counts: sidecar.counts, seed: sidecar.seed, bic_curve: sidecar.bic_curve })
    }
}
