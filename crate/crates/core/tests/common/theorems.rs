// Per-region discriminator losses under within-region resampling.
//
// A configuration fixes k regions, one discriminator logit per region, and
// real and generated counts per region. Every point in a region shares the
// region's logit, so the loss depends on the data only through the counts.

use geomgan::autodiff::{Graph, Tensor};
use geomgan::gan::{discriminator_loss, LossKind};
use geomgan::partition::weights_from_assignment;
use proptest::prelude::*;

#[derive(Debug, Clone)]
pub struct RegionConfig {
    pub logits: Vec<f64>,
    pub real: Vec<usize>,
    pub fake: Vec<usize>,
    /// Real and generated counts after resampling within regions; every
    /// region stays occupied.
    pub real_resampled: Vec<usize>,
    pub fake_resampled: Vec<usize>,
}

/// Up to 6 regions, logits in [-4, 4], 1..=40 points per region and side.
pub fn region_config() -> impl Strategy<Value = RegionConfig> {
    (1usize..=6).prop_flat_map(|k| {
        let counts = || prop::collection::vec(1usize..=40, k);
        (prop::collection::vec(-4.0f64..4.0, k), counts(), counts(), counts(), counts()).prop_map(
            |(logits, real, fake, real_resampled, fake_resampled)| RegionConfig {
                logits,
                real,
                fake,
                real_resampled,
                fake_resampled,
            },
        )
    })
}

fn expand(counts: &[usize]) -> Vec<usize> {
    counts.iter().enumerate().flat_map(|(r, &n)| std::iter::repeat_n(r, n)).collect()
}

/// Discriminator loss with every point scored by its region's logit.
pub fn region_loss(logits: &[f64], real: &[usize], fake: &[usize], weighted: bool, kind: LossKind) -> f64 {
    let k = logits.len();
    let (ar, af) = (expand(real), expand(fake));
    let column = |a: &[usize]| Tensor::column(&a.iter().map(|&r| logits[r]).collect::<Vec<_>>());
    let (wr, wf) = if weighted {
        (weights_from_assignment(&ar, k), weights_from_assignment(&af, k))
    } else {
        (vec![1.0; ar.len()], vec![1.0; af.len()])
    };
    let mut g = Graph::new();
    let lr = g.constant(column(&ar));
    let lf = g.constant(column(&af));
    let loss = discriminator_loss(&mut g, lr, lf, &wr, &wf, kind).unwrap();
    g.value(loss).item()
}

/// Gradient of the loss with respect to each region's logit.
pub fn region_logit_grad(logits: &[f64], real: &[usize], fake: &[usize], weighted: bool, kind: LossKind) -> Vec<f64> {
    let k = logits.len();
    let (ar, af) = (expand(real), expand(fake));
    let onehot = |a: &[usize]| {
        let mut t = Tensor::zeros(a.len(), k);
        for (i, &r) in a.iter().enumerate() {
            t.set(i, r, 1.0);
        }
        t
    };
    let (wr, wf) = if weighted {
        (weights_from_assignment(&ar, k), weights_from_assignment(&af, k))
    } else {
        (vec![1.0; ar.len()], vec![1.0; af.len()])
    };
    let mut g = Graph::new();
    let s = g.param(Tensor::column(logits));
    let hr = g.constant(onehot(&ar));
    let hf = g.constant(onehot(&af));
    let lr = g.matmul(hr, s).unwrap();
    let lf = g.matmul(hf, s).unwrap();
    let loss = discriminator_loss(&mut g, lr, lf, &wr, &wf, kind).unwrap();
    g.backward(loss).unwrap();
    g.grad_or_zeros(s).data().to_vec()
}

/// Importance-weighted loss is unchanged by resampling within regions.
///
/// The change is measured relative to `max(|a|, |b|, 1)`: the score-difference
/// loss is a difference of two means in [0, 1] and can cancel to zero, where a
/// plain relative error is undefined.
pub fn weighted_loss_invariant(c: &RegionConfig, kind: LossKind) -> Result<(), String> {
    let a = region_loss(&c.logits, &c.real, &c.fake, true, kind);
    let b = region_loss(&c.logits, &c.real_resampled, &c.fake_resampled, true, kind);
    let rel = (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    if rel <= 1e-12 {
        Ok(())
    } else {
        Err(format!("weighted loss moved from {a} to {b} (relative {rel:.3e})"))
    }
}

/// At the indifferent discriminator (all logits 0) with equal totals, the
/// unweighted loss has nonzero slope in exactly the regions whose real and
/// generated counts differ, so that configuration is not stationary. The
/// importance-weighted loss is flat there in every region.
pub fn stationarity_at_indifference(real: &[usize], fake: &[usize], kind: LossKind) -> Result<(), String> {
    let zero = vec![0.0; real.len()];
    let unweighted = region_logit_grad(&zero, real, fake, false, kind);
    let weighted = region_logit_grad(&zero, real, fake, true, kind);
    for r in 0..real.len() {
        let differs = real[r] != fake[r];
        if differs == (unweighted[r].abs() < 1e-12) {
            return Err(format!("region {r}: counts {} vs {}, unweighted slope {}", real[r], fake[r], unweighted[r]));
        }
        if weighted[r].abs() > 1e-12 {
            return Err(format!("region {r}: weighted slope {} at indifference", weighted[r]));
        }
    }
    Ok(())
}

/// Generated counts with the same total as `c.real`, roughly proportional to
/// `c.fake`, every region occupied.
pub fn equal_total_fake(c: &RegionConfig) -> Vec<usize> {
    let total: usize = c.real.iter().sum();
    let k = c.real.len();
    let mut fake: Vec<usize> = vec![1; k];
    let extra = total - k;
    let weight: usize = c.fake.iter().sum();
    let mut assigned = 0;
    for r in 0..k {
        let share = extra * c.fake[r] / weight;
        fake[r] += share;
        assigned += share;
    }
    fake[0] += extra - assigned;
    fake
}
