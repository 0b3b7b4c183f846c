//! Label transfer scoring, per-population mean agreement and density grids.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autodiff::Tensor;
use crate::data::Dataset;
use crate::error::{GeomError, Result};
use crate::manifold::ManifoldModel;

/// Where 1-NN distances are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalSpace {
    #[default]
    Data,
    Latent,
}

fn nearest_index(row: &[f64], target: &Tensor) -> usize {
    let mut best = (0, f64::INFINITY);
    for (j, t) in target.iter_rows().enumerate() {
        let d: f64 = row.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best.1 {
            best = (j, d);
        }
    }
    best.0
}

/// Label of each mapped row's nearest labeled target row; ties go to the
/// lowest target index.
pub fn nn_label_transfer(mapped: &Tensor, target: &Dataset) -> Result<Vec<i64>> {
    let labels = target.labels().ok_or_else(|| GeomError::Config("target dataset has no labels".into()))?;
    if target.is_empty() {
        return Err(GeomError::Config("target dataset is empty".into()));
    }
    if mapped.rows() > 0 && mapped.cols() != target.dim() {
        return Err(GeomError::Dimension { op: "nn_label_transfer", left: mapped.shape(), right: target.rows().shape() });
    }
    let rows: Vec<&[f64]> = mapped.iter_rows().collect();
    Ok(rows.par_iter().map(|r| labels[nearest_index(r, target.rows())]).collect())
}

/// [`nn_label_transfer`] in the chosen space; latent uses the target manifold.
pub fn transfer_labels(mapped: &Tensor, target: &Dataset, space: EvalSpace, manifold: &ManifoldModel) -> Result<Vec<i64>> {
    match space {
        EvalSpace::Data => nn_label_transfer(mapped, target),
        EvalSpace::Latent => {
            let t = target.with_rows(manifold.encode(target.rows())?)?;
            nn_label_transfer(&manifold.encode(mapped)?, &t)
        }
    }
}

fn check_len(pred: &[i64], truth: &[i64]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(GeomError::Dimension { op: "labels", left: (pred.len(), 1), right: (truth.len(), 1) });
    }
    Ok(())
}

/// F1 of one class; zero when precision and recall are both zero.
pub fn f_score(pred: &[i64], truth: &[i64], class_id: i64) -> Result<f64> {
    check_len(pred, truth)?;
    let (mut tp, mut fp, mut fnn) = (0usize, 0usize, 0usize);
    for (&p, &t) in pred.iter().zip(truth) {
        match (p == class_id, t == class_id) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fnn += 1,
            _ => {}
        }
    }
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fnn == 0 { 0.0 } else { tp as f64 / (tp + fnn) as f64 };
    Ok(if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) })
}

/// Per-class F1 over every label seen in either vector.
pub fn per_class_f(pred: &[i64], truth: &[i64]) -> Result<BTreeMap<i64, f64>> {
    check_len(pred, truth)?;
    let classes: BTreeSet<i64> = pred.iter().chain(truth).copied().collect();
    classes.into_iter().map(|c| Ok((c, f_score(pred, truth, c)?))).collect()
}

/// Unweighted mean of [`per_class_f`].
pub fn macro_f(pred: &[i64], truth: &[i64]) -> Result<f64> {
    let per = per_class_f(pred, truth)?;
    if per.is_empty() {
        return Ok(0.0);
    }
    Ok(per.values().sum::<f64>() / per.len() as f64)
}

/// Rows are true classes, columns predicted classes, both in `classes` order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub classes: Vec<i64>,
    pub counts: Vec<Vec<usize>>,
}

pub fn confusion_matrix(pred: &[i64], truth: &[i64], classes: &[i64]) -> Result<Confusion> {
    check_len(pred, truth)?;
    let index: BTreeMap<i64, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut counts = vec![vec![0usize; classes.len()]; classes.len()];
    for (&p, &t) in pred.iter().zip(truth) {
        let (Some(&pi), Some(&ti)) = (index.get(&p), index.get(&t)) else {
            return Err(GeomError::Contract(format!("label pair ({t}, {p}) outside the class list")));
        };
        counts[ti][pi] += 1;
    }
    Ok(Confusion { classes: classes.to_vec(), counts })
}

impl Confusion {
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["truth".to_string()];
        header.extend(self.classes.iter().map(|c| format!("pred_{c}")));
        w.write_record(&header)?;
        for (c, row) in self.classes.iter().zip(&self.counts) {
            let mut rec = vec![c.to_string()];
            rec.extend(row.iter().map(usize::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Squared Pearson correlation; 1 for identical constant vectors and 0 for
/// any other zero-variance case.
pub fn pearson_r2(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return if a == b { 1.0 } else { 0.0 };
    }
    (sab * sab / (saa * sbb)).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R2Pair {
    pub before: f64,
    pub after: f64,
}

fn masked_means(rows: &Tensor, keep: &[bool]) -> Result<Vec<f64>> {
    let idx: Vec<usize> = keep.iter().enumerate().filter(|(_, k)| **k).map(|(i, _)| i).collect();
    if idx.is_empty() {
        return Err(GeomError::Contract("population mask selects no rows".into()));
    }
    Ok(rows.select_rows(&idx).column_means())
}

/// Agreement of per-feature population means with the target population,
/// before (source) and after (mapped) alignment.
///
/// `mask` is applied to every source row (and the same indices of `mapped`)
/// and to every target row, given the row values and label.
pub fn population_mean_r2(
    source: &Dataset,
    mapped: &Tensor,
    target: &Dataset,
    mask: impl Fn(&[f64], Option<i64>) -> bool,
) -> Result<R2Pair> {
    if mapped.rows() != source.len() {
        return Err(GeomError::Dimension { op: "population_mean_r2", left: mapped.shape(), right: source.rows().shape() });
    }
    if source.dim() != target.dim() || mapped.cols() != target.dim() {
        return Err(GeomError::Dimension { op: "population_mean_r2", left: source.rows().shape(), right: target.rows().shape() });
    }
    let keep = |d: &Dataset| -> Vec<bool> {
        d.rows().iter_rows().enumerate().map(|(i, r)| mask(r, d.labels().map(|l| l[i]))).collect()
    };
    let ks = keep(source);
    let t = masked_means(target.rows(), &keep(target))?;
    let before = masked_means(source.rows(), &ks)?;
    let after = masked_means(mapped, &ks)?;
    Ok(R2Pair { before: pearson_r2(&t, &before), after: pearson_r2(&t, &after) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major over `ys` then `xs`.
    pub density: Vec<f64>,
    pub bandwidth: (f64, f64),
}

/// Scott's rule `n^(-1/6) * sd` per dimension; a zero spread falls back to 1.
pub fn scott_bandwidth(points: &Tensor) -> (f64, f64) {
    let n = points.rows() as f64;
    let m = points.column_means();
    let sd = |c: usize| {
        let v = points.iter_rows().map(|r| (r[c] - m[c]).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let s = v.sqrt();
        if s > 0.0 {
            s
        } else {
            1.0
        }
    };
    let f = n.powf(-1.0 / 6.0);
    (f * sd(0), f * sd(1))
}

/// Gaussian product-kernel density on a regular grid.
pub fn kde_grid(points: &Tensor, bandwidth: Option<(f64, f64)>, grid: GridSpec) -> Result<KdeGrid> {
    if points.cols() != 2 || points.is_empty() {
        return Err(GeomError::Config(format!("kde needs nonempty 2-D points, got {:?}", points.shape())));
    }
    if grid.resolution < 2 || grid.x_range.0 >= grid.x_range.1 || grid.y_range.0 >= grid.y_range.1 {
        return Err(GeomError::Config("kde grid needs resolution >= 2 and increasing ranges".into()));
    }
    let (hx, hy) = bandwidth.unwrap_or_else(|| scott_bandwidth(points));
    if !(hx > 0.0 && hy > 0.0) {
        return Err(GeomError::Config("kde bandwidth must be positive".into()));
    }
    let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
        (0..grid.resolution).map(|i| lo + (hi - lo) * i as f64 / (grid.resolution - 1) as f64).collect()
    };
    let (xs, ys) = (axis(grid.x_range), axis(grid.y_range));
    let norm = 1.0 / (2.0 * std::f64::consts::PI * hx * hy * points.rows() as f64);
    let density = ys
        .par_iter()
        .flat_map_iter(|&y| {
            xs.iter()
                .map(move |&x| {
                    points
                        .iter_rows()
                        .map(|p| (-0.5 * (((x - p[0]) / hx).powi(2) + ((y - p[1]) / hy).powi(2))).exp())
                        .sum::<f64>()
                        * norm
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(KdeGrid { xs, ys, density, bandwidth: (hx, hy) })
}

impl KdeGrid {
    pub fn at(&self, yi: usize, xi: usize) -> f64 {
        self.density[yi * self.xs.len() + xi]
    }

    /// Trapezoid-rule integral over the grid.
    pub fn integral(&self) -> f64 {
        let trap = |v: &[f64], step: f64| step * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]));
        let (dx, dy) = (self.xs[1] - self.xs[0], self.ys[1] - self.ys[0]);
        let rows: Vec<f64> = self.density.chunks(self.xs.len()).map(|r| trap(r, dx)).collect();
        trap(&rows, dy)
    }

    pub fn max(&self) -> f64 {
        self.density.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Long-format `x,y,density` CSV.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["x", "y", "density"])?;
        for (yi, y) in self.ys.iter().enumerate() {
            for (xi, x) in self.xs.iter().enumerate() {
                w.write_record([x.to_string(), y.to_string(), self.at(yi, xi).to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Scores of one mapped domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainScores {
    pub f_scores: BTreeMap<i64, f64>,
    pub macro_f: f64,
    pub confusion: Confusion,
}

/// Scores `pred` against `truth` over the union of their labels.
pub fn score_domain(pred: &[i64], truth: &[i64]) -> Result<DomainScores> {
    let f_scores = per_class_f(pred, truth)?;
    let classes: Vec<i64> = f_scores.keys().copied().collect();
    Ok(DomainScores {
        macro_f: macro_f(pred, truth)?,
        confusion: confusion_matrix(pred, truth, &classes)?,
        f_scores,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Keyed by `variant/domain`, e.g. `mgm/x_to_y`.
    pub domains: BTreeMap<String, DomainScores>,
    pub r_squared: BTreeMap<String, R2Pair>,
    /// Free-form scalar results such as region entropies.
    pub metrics: BTreeMap<String, f64>,
    /// Names of KDE grid CSVs written beside the report.
    pub kde_files: Vec<String>,
    pub seed: u64,
    pub config_hash: String,
}

impl EvalReport {
    /// `report.json`, `f_scores.csv` and one confusion CSV per domain key.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        let mut w = csv::Writer::from_path(dir.join("f_scores.csv"))?;
        w.write_record(["key", "class", "f_score"])?;
        for (key, s) in &self.domains {
            for (c, f) in &s.f_scores {
                w.write_record([key.clone(), c.to_string(), f.to_string()])?;
            }
            w.write_record([key.clone(), "macro".into(), s.macro_f.to_string()])?;
            s.confusion.write_csv(dir.join(format!("confusion_{}.csv", key.replace('/', "_"))))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled(rows: Vec<Vec<f64>>, labels: Vec<i64>) -> Dataset {
        Dataset::new(Tensor::from_rows(&rows).unwrap(), Some(labels), None, "t").unwrap()
    }

    #[test]
    fn transfer_exact_and_ties() {
        let t = labeled(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![5.0, 5.0]], vec![7, 8, 9]);
        let q = Tensor::from_rows(&[vec![5.0, 5.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(nn_label_transfer(&q, &t).unwrap(), vec![9, 7]);
        let unlabeled = Dataset::unlabeled(t.rows().clone()).unwrap();
        assert!(nn_label_transfer(&q, &unlabeled).is_err());
    }

    #[test]
    fn transfer_matches_distance_table() {
        let t = labeled(
            vec![vec![0.0, 0.0], vec![3.0, 1.0], vec![-2.0, 4.0], vec![1.0, -3.0], vec![4.0, 4.0]],
            vec![0, 1, 2, 3, 4],
        );
        let q = Tensor::from_rows(&[vec![0.9, 0.1], vec![2.6, 3.1], vec![-1.0, 2.9], vec![0.4, -1.8], vec![2.1, 0.4]])
            .unwrap();
        // squared distances, nearest per query worked out by hand:
        // q0 -> 0 (0.82), q1 -> 4 (2.77), q2 -> 2 (2.21), q3 -> 3 (1.8), q4 -> 1 (1.17)
        assert_eq!(nn_label_transfer(&q, &t).unwrap(), vec![0, 4, 2, 3, 1]);
    }

    #[test]
    fn f_score_cases() {
        assert_eq!(f_score(&[1, 2, 1], &[1, 2, 1], 1).unwrap(), 1.0);
        assert_eq!(f_score(&[2, 2, 2], &[1, 2, 1], 1).unwrap(), 0.0);
        // TP=2, FP=1, FN=1
        let f = f_score(&[1, 1, 1, 0, 0], &[1, 1, 0, 1, 0], 1).unwrap();
        assert!((f - 2.0 / 3.0).abs() < 1e-15);
        let truth = [0, 1, 2, 2, 1];
        let relabel: Vec<i64> = truth.iter().map(|t| (t + 1) % 3).collect();
        let back: Vec<i64> = relabel.iter().map(|p| (p + 2) % 3).collect();
        assert_eq!(macro_f(&back, &truth).unwrap(), 1.0);
    }

    #[test]
    fn confusion_cases() {
        let c = confusion_matrix(&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]).unwrap();
        assert_eq!(c.counts, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let pred = [0, 0, 1, 1, 1, 0];
        let truth = [0, 1, 1, 1, 0, 0];
        let c = confusion_matrix(&pred, &truth, &[0, 1]).unwrap();
        assert_eq!(c.counts, vec![vec![2, 1], vec![1, 2]]);
        assert_eq!(c.counts.iter().flatten().sum::<usize>(), 6);
        assert!(confusion_matrix(&[5], &[0], &[0, 1]).is_err());
    }

    #[test]
    fn r2_cases() {
        let src = labeled(vec![vec![0.0, 0.0, 0.0, 0.0], vec![1.0, 2.0, 0.0, 1.0]], vec![0, 0]);
        let target = labeled(vec![vec![1.0, 2.0, 3.0, 4.0], vec![3.0, 4.0, 5.0, 6.0]], vec![0, 0]);
        let exact = target.rows().clone();
        let all = |_: &[f64], _: Option<i64>| true;
        assert_eq!(population_mean_r2(&src, &exact, &target, all).unwrap().after, 1.0);
        let affine = exact.map(|v| 3.0 * v - 2.0);
        assert!((population_mean_r2(&src, &affine, &target, all).unwrap().after - 1.0).abs() < 1e-12);
        // target means (2,3,4,5), source means (0.5,1,0,0.5):
        // centered (-1.5,-.5,.5,1.5) and (0,.5,-.5,0): sab = -0.5, saa = 5, sbb = 0.5
        let r = population_mean_r2(&src, src.rows(), &target, all).unwrap();
        assert!((r.before - 0.25 / 2.5).abs() < 1e-12);
        assert_eq!(r.before, r.after);
    }

    #[test]
    fn kde_cases() {
        let p = Tensor::from_rows(&[vec![0.5, -0.5]]).unwrap();
        let grid = GridSpec { x_range: (-4.5, 5.5), y_range: (-5.5, 4.5), resolution: 101 };
        let k = kde_grid(&p, Some((0.7, 0.7)), grid).unwrap();
        assert!((k.integral() - 1.0).abs() < 0.02);
        assert_eq!(k.max(), k.at(50, 50));
        assert!((k.at(50, 40) - k.at(50, 60)).abs() < 1e-12);
        assert!((k.at(40, 50) - k.at(50, 40)).abs() < 1e-12);
        let wide = kde_grid(&p, Some((1.4, 1.4)), grid).unwrap();
        assert!(wide.max() < k.max());

        let pts = Tensor::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.5], vec![-0.5, 1.0], vec![0.3, -0.8]]).unwrap();
        let k = kde_grid(&pts, None, GridSpec { x_range: (-6.0, 6.0), y_range: (-6.0, 6.0), resolution: 121 }).unwrap();
        assert!((k.integral() - 1.0).abs() < 0.02, "{}", k.integral());
    }

    #[test]
    fn report_files() {
        let s = score_domain(&[0, 1, 1], &[0, 1, 0]).unwrap();
        let mut r = EvalReport::default();
        r.domains.insert("mgm/x_to_y".into(), s);
        let dir = tempfile::tempdir().unwrap();
        r.write(dir.path()).unwrap();
        assert!(dir.path().join("confusion_mgm_x_to_y.csv").exists());
        let back: EvalReport = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
