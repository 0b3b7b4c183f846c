//! Shared oracles for the integration and acceptance tests.
#![allow(dead_code)]

pub mod theorems;

// Finite-difference oracle. Tolerance:
// |analytic - numeric| <= 1e-4 * max(|analytic|, |numeric|, 1e-3).
// The floor keeps round-off in near-zero gradients from dominating.

use geomgan::autodiff::{Graph, Tensor, Var};
use geomgan::gan::{discriminator_loss, generator_loss, LossKind};
use geomgan::nn::{init_mlp, leaky_activations, Activation, BoundMlp, Mlp};
use geomgan::rng::seeded;
use rand::Rng;

const EPS: f64 = 1e-6;
const REL_TOL: f64 = 1e-4;

pub fn assert_close(analytic: f64, numeric: f64, what: &str) {
    let scale = analytic.abs().max(numeric.abs()).max(1e-3);
    assert!(
        (analytic - numeric).abs() <= REL_TOL * scale,
        "{what}: analytic {analytic:.10e} vs numeric {numeric:.10e}"
    );
}

/// Values in ±[0.1, 1.5]: away from the kinks of relu, leaky relu and l1.
pub fn random_tensor(rows: usize, cols: usize, rng: &mut impl Rng) -> Tensor {
    let data = (0..rows * cols)
        .map(|_| {
            let m: f64 = rng.random_range(0.1..1.5);
            if rng.random_bool(0.5) {
                m
            } else {
                -m
            }
        })
        .collect();
    Tensor::from_vec(rows, cols, data).unwrap()
}

/// Reduces any output to a scalar through a fixed random projection so every
/// output element feeds the gradient.
pub fn project(g: &mut Graph, out: Var, seed: u64) -> Var {
    let (r, c) = g.value(out).shape();
    if (r, c) == (1, 1) {
        return out;
    }
    let w = g.constant(random_tensor(r, c, &mut seeded(seed)));
    let m = g.elementwise_mul(out, w).unwrap();
    g.sum(m)
}

/// Checks `f`'s gradient with respect to every element of every input.
pub fn check_op(name: &str, inputs: &[Tensor], f: impl Fn(&mut Graph, &[Var]) -> Var) {
    let eval = |vals: &[Tensor]| -> f64 {
        let mut g = Graph::new();
        let vars: Vec<Var> = vals.iter().map(|t| g.constant(t.clone())).collect();
        let out = f(&mut g, &vars);
        let s = project(&mut g, out, 99);
        g.value(s).item()
    };
    let mut g = Graph::new();
    let vars: Vec<Var> = inputs.iter().map(|t| g.param(t.clone())).collect();
    let out = f(&mut g, &vars);
    let s = project(&mut g, out, 99);
    g.backward(s).unwrap();
    for (i, v) in vars.iter().enumerate() {
        let grad = g.grad_or_zeros(*v);
        for k in 0..inputs[i].len() {
            let mut plus = inputs.to_vec();
            plus[i].data_mut()[k] += EPS;
            let mut minus = inputs.to_vec();
            minus[i].data_mut()[k] -= EPS;
            let numeric = (eval(&plus) - eval(&minus)) / (2.0 * EPS);
            assert_close(grad.data()[k], numeric, &format!("{name} input {i} element {k}"));
        }
    }
}

pub fn elementwise_and_linear_ops() {
    let mut rng = seeded(1);
    let a = random_tensor(3, 4, &mut rng);
    let b = random_tensor(3, 4, &mut rng);
    let m = random_tensor(4, 2, &mut rng);
    let row = random_tensor(1, 4, &mut rng);
    check_op("matmul", &[a.clone(), m], |g, v| g.matmul(v[0], v[1]).unwrap());
    check_op("add", &[a.clone(), b.clone()], |g, v| g.add(v[0], v[1]).unwrap());
    check_op("sub", &[a.clone(), b.clone()], |g, v| g.sub(v[0], v[1]).unwrap());
    check_op("scalar_mul", &[a.clone()], |g, v| g.scalar_mul(v[0], -2.5));
    check_op("elementwise_mul", &[a.clone(), b.clone()], |g, v| g.elementwise_mul(v[0], v[1]).unwrap());
    check_op("broadcast_add_rowvec", &[a.clone(), row], |g, v| g.broadcast_add_rowvec(v[0], v[1]).unwrap());
    check_op("sum", &[a.clone()], |g, v| g.sum(v[0]));
    check_op("reduce_mean", &[a.clone()], |g, v| g.reduce_mean(v[0]).unwrap());
}

pub fn activations() {
    let mut rng = seeded(2);
    let a = random_tensor(4, 3, &mut rng);
    check_op("leaky_relu", &[a.clone()], |g, v| g.leaky_relu(v[0], 0.2).unwrap());
    check_op("relu", &[a.clone()], |g, v| g.relu(v[0]));
    check_op("tanh", &[a.clone()], |g, v| g.tanh(v[0]));
    check_op("sigmoid", &[a.scale(3.0)], |g, v| g.sigmoid(v[0]));
}

pub fn losses_and_reductions() {
    let mut rng = seeded(3);
    let a = random_tensor(5, 1, &mut rng);
    let b = random_tensor(5, 1, &mut rng);
    let w: Vec<f64> = (0..5).map(|_| rng.random_range(0.1..2.0)).collect();
    let targets = [1.0, 0.0, 1.0, 0.0, 1.0];
    check_op("weighted_mean", &[a.clone()], |g, v| g.weighted_mean(v[0], &w).unwrap());
    check_op("mse", &[a.clone(), b.clone()], |g, v| g.mse(v[0], v[1]).unwrap());
    // l1 kinks where a == b; shift b so no pair is close to equal
    let b_far = b.map(|x| x + 4.0);
    check_op("l1", &[a.clone(), b_far], |g, v| g.l1(v[0], v[1]).unwrap());
    check_op("bce_with_logits", &[a.scale(4.0)], |g, v| g.bce_with_logits(v[0], &targets, &w).unwrap());
}

pub fn pairwise_distances_of_distinct_points() {
    let x = random_tensor(5, 3, &mut seeded(4));
    check_op("pairwise_distances", &[x], |g, v| g.pairwise_distances(v[0]));
}

pub fn composite_chain() {
    let mut rng = seeded(5);
    let x = random_tensor(4, 3, &mut rng);
    let w = random_tensor(3, 3, &mut rng);
    check_op("chain", &[x, w], |g, v| {
        let h = g.matmul(v[0], v[1]).unwrap();
        let h = g.tanh(h);
        let d = g.pairwise_distances(h);
        let s = g.sigmoid(d);
        g.reduce_mean(s).unwrap()
    });
}

/// Checks the gradient of `loss` with respect to every parameter of `net`.
/// The closure receives `net` bound into the graph.
pub fn check_net(name: &str, net: &Mlp, loss: impl Fn(&mut Graph, &BoundMlp) -> Var) {
    let value = |m: &Mlp| {
        let mut g = Graph::new();
        let b = m.bind(&mut g, false);
        let l = loss(&mut g, &b);
        g.value(l).item()
    };
    let mut g = Graph::new();
    let b = net.bind(&mut g, true);
    let l = loss(&mut g, &b);
    g.backward(l).unwrap();
    let analytic = b.grads(&g);
    let mut probe = net.clone();
    let sizes: Vec<usize> = net.params().iter().map(|t| t.len()).collect();
    for (pi, &n) in sizes.iter().enumerate() {
        for k in 0..n {
            let orig = probe.params()[pi].data()[k];
            probe.params_mut()[pi].data_mut()[k] = orig + EPS;
            let up = value(&probe);
            probe.params_mut()[pi].data_mut()[k] = orig - EPS;
            let down = value(&probe);
            probe.params_mut()[pi].data_mut()[k] = orig;
            assert_close(analytic[pi].data()[k], (up - down) / (2.0 * EPS), &format!("{name} param {pi} element {k}"));
        }
    }
}

pub fn small_net(dims: &[usize], out: Activation, seed: u64) -> Mlp {
    init_mlp(dims, &leaky_activations(dims.len() - 1, out), seed).unwrap()
}

pub fn discriminator_losses_match_finite_differences() {
    let mut rng = seeded(6);
    let real = random_tensor(6, 2, &mut rng);
    let fake = random_tensor(5, 2, &mut rng);
    let wr: Vec<f64> = (0..6).map(|_| rng.random_range(0.1..1.0)).collect();
    let wf: Vec<f64> = (0..5).map(|_| rng.random_range(0.1..1.0)).collect();
    let disc = small_net(&[2, 5, 4, 1], Activation::Linear, 7);
    for kind in [LossKind::ClassicSigmoid, LossKind::ScoreDifference] {
        check_net(&format!("discriminator {kind:?}"), &disc, |g, d| {
            let xr = g.constant(real.clone());
            let xf = g.constant(fake.clone());
            let lr = d.forward(g, xr).unwrap();
            let lf = d.forward(g, xf).unwrap();
            discriminator_loss(g, lr, lf, &wr, &wf, kind).unwrap()
        });
    }
}

pub fn generator_losses_match_finite_differences() {
    let mut rng = seeded(8);
    let z = random_tensor(6, 3, &mut rng);
    let wf: Vec<f64> = (0..6).map(|_| rng.random_range(0.1..1.0)).collect();
    let gen = small_net(&[3, 5, 2], Activation::Linear, 9);
    let disc = small_net(&[2, 4, 1], Activation::Linear, 10);
    for kind in [LossKind::ClassicSigmoid, LossKind::ScoreDifference] {
        check_net(&format!("generator {kind:?}"), &gen, |g, gb| {
            let d = disc.bind(g, false);
            let zv = g.constant(z.clone());
            let fake = gb.forward(g, zv).unwrap();
            let lf = d.forward(g, fake).unwrap();
            generator_loss(g, lf, &wf, kind).unwrap()
        });
    }
}

pub fn residual_network_forward_and_gradients() {
    let mut rng = seeded(11);
    let x = random_tensor(5, 3, &mut rng);
    let net = small_net(&[3, 6, 3], Activation::Linear, 12).with_residual(true).unwrap();
    let mut g = Graph::new();
    let b = net.bind(&mut g, false);
    let xv = g.constant(x.clone());
    let out = b.forward(&mut g, xv).unwrap();
    assert_eq!(g.value(out), &net.predict(&x).unwrap());
    let target = random_tensor(5, 3, &mut rng);
    check_net("residual mlp", &net, |g, b| {
        let xv = g.constant(x.clone());
        let out = b.forward(g, xv).unwrap();
        let t = g.constant(target.clone());
        g.mse(out, t).unwrap()
    });
}

/// Every gradient check above.
pub fn all_gradient_checks() {
    elementwise_and_linear_ops();
    activations();
    losses_and_reductions();
    pairwise_distances_of_distinct_points();
    composite_chain();
    discriminator_losses_match_finite_differences();
    generator_losses_match_finite_differences();
    residual_network_forward_and_gradients();
}
