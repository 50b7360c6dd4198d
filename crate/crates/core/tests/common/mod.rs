#![allow(dead_code)]

use bayesbound::zoo::{make_discrete, DiscreteKind};
use bayesbound::DiscreteProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Random probability vector of length `n`, with an occasional exact zero.
pub fn random_simplex(rng: &mut ChaCha20Rng, n: usize, allow_zeros: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    if allow_zeros && n > 1 {
        for x in v.iter_mut() {
            if rng.random::<f64>() < 0.15 {
                *x = 0.0;
            }
        }
        if v.iter().all(|x| *x == 0.0) {
            v[0] = 1.0;
        }
    }
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

/// Random finite problem with sizes bounded by `max_size`.
pub fn random_problem(seed: u64, max_size: usize, general_loss: bool) -> DiscreteProblem {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n_params = rng.random_range(2..=max_size);
    let n_obs = rng.random_range(1..=max_size);
    let n_actions = if general_loss {
        rng.random_range(1..=max_size)
    } else if rng.random::<f64>() < 0.7 {
        n_params
    } else {
        rng.random_range(1..=max_size)
    };
    make_discrete(
        DiscreteKind::Random {
            n_params,
            n_obs,
            n_actions,
            general_loss,
        },
        seed,
    )
    .expect("fixture sizes are valid")
}

/// Exponentiated-gradient minimization of a convex function on the simplex,
/// returning the smallest objective value seen.
pub fn simplex_minimize<F, G>(n: usize, objective: F, gradient: G, iterations: usize) -> f64
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let mut q = vec![1.0 / n as f64; n];
    let mut best = objective(&q);
    let mut step = 1.0;
    for _ in 0..iterations {
        let g = gradient(&q);
        let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let mut cand: Vec<f64> = q
            .iter()
            .zip(&g)
            .map(|(qi, gi)| qi * (-step * gi / scale).exp())
            .collect();
        let s: f64 = cand.iter().sum();
        cand.iter_mut().for_each(|v| *v /= s);
        let val = objective(&cand);
        if val <= best {
            best = val;
            q = cand;
            step = (step * 1.2).min(4.0);
        } else {
            step *= 0.5;
            if step < 1e-14 {
                break;
            }
        }
    }
    best
}

/// `inf_q Σ_θ w_θ χ²(P_θ || q)` found numerically.
pub fn chi2_informativity_numeric(problem: &DiscreteProblem) -> f64 {
    let m = problem.n_obs();
    let w = problem.prior().weights().to_vec();
    let a: Vec<f64> = (0..m)
        .map(|x| (0..problem.n_params()).map(|t| w[t] * problem.row(t)[x].powi(2)).sum())
        .collect();
    let obj = |q: &[f64]| -> f64 {
        a.iter()
            .zip(q)
            .map(|(ai, qi)| if *ai == 0.0 { 0.0 } else { ai / qi })
            .sum::<f64>()
            - 1.0
    };
    let grad = |q: &[f64]| -> Vec<f64> {
        a.iter()
            .zip(q)
            .map(|(ai, qi)| if *ai == 0.0 { 0.0 } else { -ai / (qi * qi) })
            .collect()
    };
    simplex_minimize(m, obj, grad, 10_000)
}

/// `inf_q Σ_θ w_θ D_{1-√x}(P_θ || q)` found numerically.
pub fn hellinger_informativity_numeric(problem: &DiscreteProblem) -> f64 {
    let m = problem.n_obs();
    let w = problem.prior().weights().to_vec();
    let b: Vec<f64> = (0..m)
        .map(|x| (0..problem.n_params()).map(|t| w[t] * problem.row(t)[x].sqrt()).sum())
        .collect();
    let obj = |q: &[f64]| -> f64 { 1.0 - b.iter().zip(q).map(|(bi, qi)| bi * qi.sqrt()).sum::<f64>() };
    let grad = |q: &[f64]| -> Vec<f64> {
        b.iter()
            .zip(q)
            .map(|(bi, qi)| if *bi == 0.0 { 0.0 } else { -bi / (2.0 * qi.sqrt().max(1e-300)) })
            .collect()
    };
    simplex_minimize(m, obj, grad, 10_000)
}
