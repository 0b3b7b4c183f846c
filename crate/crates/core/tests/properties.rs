//! Property tests over randomized inputs.

mod common;

use common::theorems::{equal_total_fake, region_config, stationarity_at_indifference, weighted_loss_invariant};
use geomgan::autodiff::{pairwise_distances, Tensor};
use geomgan::data::{load_csv, save_csv, Dataset};
use geomgan::eval::{confusion_matrix, f_score, kde_grid, macro_f, nn_label_transfer, GridSpec};
use geomgan::gan::LossKind;
use geomgan::nn::{init_mlp, leaky_activations, read_mlp, write_mlp, Activation};
use geomgan::partition::Partition;
use proptest::prelude::*;

fn tensor(rows: usize, cols: usize) -> impl Strategy<Value = Tensor> {
    prop::collection::vec(-10.0f64..10.0, rows * cols).prop_map(move |d| Tensor::from_vec(rows, cols, d).unwrap())
}

/// Data rows with a partition whose centroids are drawn separately.
fn data_and_centroids() -> impl Strategy<Value = (Tensor, Tensor)> {
    (1usize..60, 1usize..8, 1usize..4).prop_flat_map(|(n, k, d)| (tensor(n, d), tensor(k, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn importance_weighted_loss_ignores_within_region_density(c in region_config()) {
        for kind in [LossKind::ClassicSigmoid, LossKind::ScoreDifference] {
            weighted_loss_invariant(&c, kind).map_err(TestCaseError::fail)?;
        }
    }

    #[test]
    fn unweighted_loss_is_not_stationary_when_counts_differ(c in region_config()) {
        let fake = equal_total_fake(&c);
        for kind in [LossKind::ClassicSigmoid, LossKind::ScoreDifference] {
            stationarity_at_indifference(&c.real, &fake, kind).map_err(TestCaseError::fail)?;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn region_weights_sum_to_one_and_equal_inverse_counts((x, c) in data_and_centroids()) {
        let p = Partition::from_centroids(c, &x, 0).unwrap();
        let assign = p.assign_region(&x).unwrap();
        let w = p.compute_weights(&x).unwrap().weights;
        let mut sums = vec![0.0; p.k()];
        for (i, &r) in assign.iter().enumerate() {
            prop_assert_eq!(w[i], 1.0 / p.region_counts()[r] as f64);
            sums[r] += w[i];
        }
        for (r, s) in sums.iter().enumerate() {
            if p.region_counts()[r] > 0 {
                prop_assert!((s - 1.0).abs() < 1e-12, "region {} sums to {}", r, s);
            }
        }
    }

    #[test]
    fn weights_are_permutation_equivariant((x, c) in data_and_centroids(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..x.rows()).collect();
        perm.shuffle(&mut geomgan::rng::seeded(seed));
        let p = Partition::from_centroids(c, &x, 0).unwrap();
        let w = p.compute_weights(&x).unwrap().weights;
        let wp = p.compute_weights(&x.select_rows(&perm)).unwrap().weights;
        for (j, &i) in perm.iter().enumerate() {
            prop_assert_eq!(wp[j], w[i]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn label_transfer_ignores_target_order(
        target in tensor(12, 2),
        queries in tensor(8, 2),
        labels in prop::collection::vec(0i64..4, 12),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let d = Dataset::new(target.clone(), Some(labels.clone()), None, "t").unwrap();
        let mut perm: Vec<usize> = (0..12).collect();
        perm.shuffle(&mut geomgan::rng::seeded(seed));
        let dp = d.select(&perm);
        // exact distance ties are measure-zero for continuous draws
        prop_assert_eq!(nn_label_transfer(&queries, &d).unwrap(), nn_label_transfer(&queries, &dp).unwrap());
    }

    #[test]
    fn relabeled_perfect_prediction_scores_one(truth in prop::collection::vec(0i64..5, 1..50), shift in 1i64..7) {
        let relabel = |l: i64| (l + shift) % 7;
        let pred: Vec<i64> = truth.iter().map(|&l| relabel(l)).collect();
        let mapped_truth: Vec<i64> = truth.iter().map(|&l| relabel(l)).collect();
        prop_assert_eq!(macro_f(&pred, &mapped_truth).unwrap(), 1.0);
    }

    #[test]
    fn f_scores_bounded_and_confusion_rows_count_truth(
        truth in prop::collection::vec(0i64..4, 1..60),
        noise in prop::collection::vec(0i64..4, 60),
    ) {
        let pred: Vec<i64> = noise[..truth.len()].to_vec();
        for c in 0..4 {
            let f = f_score(&pred, &truth, c).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
        }
        let classes = [0, 1, 2, 3];
        let m = confusion_matrix(&pred, &truth, &classes).unwrap();
        for (i, &c) in classes.iter().enumerate() {
            let row: usize = m.counts[i].iter().sum();
            prop_assert_eq!(row, truth.iter().filter(|&&t| t == c).count());
        }
    }

    #[test]
    fn pairwise_distances_match_brute_force(x in (2usize..8, 1usize..4).prop_flat_map(|(n, d)| tensor(n, d))) {
        let got = pairwise_distances(&x);
        let mut k = 0;
        for i in 0..x.rows() {
            for j in (i + 1)..x.rows() {
                let d: f64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                prop_assert!((got.data()[k] - d).abs() <= 1e-12 * d.max(1.0));
                k += 1;
            }
        }
        prop_assert_eq!(k, got.len());
    }

    #[test]
    fn kde_integrates_to_one_inside_grid(pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20)) {
        let rows: Vec<Vec<f64>> = pts.iter().map(|&(a, b)| vec![a, b]).collect();
        let x = Tensor::from_rows(&rows).unwrap();
        let grid = GridSpec { x_range: (-6.0, 6.0), y_range: (-6.0, 6.0), resolution: 121 };
        let k = kde_grid(&x, Some((0.5, 0.5)), grid).unwrap();
        prop_assert!((k.integral() - 1.0).abs() < 0.02, "integral {}", k.integral());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip_is_exact(x in (1usize..10, 1usize..5).prop_flat_map(|(n, d)| tensor(n, d)), labels in prop::collection::vec(-3i64..3, 10)) {
        let d = Dataset::new(x.clone(), Some(labels[..x.rows()].to_vec()), None, "t").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        save_csv(&d, &path).unwrap();
        let back = load_csv(&path, Some("label")).unwrap();
        prop_assert_eq!(back.rows(), d.rows());
        prop_assert_eq!(back.labels(), d.labels());
    }

    #[test]
    fn model_bytes_round_trip(dims in prop::collection::vec(1usize..6, 2..5), seed in any::<u64>()) {
        let m = init_mlp(&dims, &leaky_activations(dims.len() - 1, Activation::Tanh), seed).unwrap();
        let mut buf = Vec::new();
        write_mlp(&mut buf, &m).unwrap();
        let back = read_mlp(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back, m);
    }
}
