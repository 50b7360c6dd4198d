//! Ground-truth risks used to check bounds: exact for finite problems,
//! closed form for the conjugate Gaussian, Monte Carlo otherwise.
//!
//! Monte Carlo runs split the samples into [`MC_CHUNKS`] fixed chunks, each
//! driven by its own ChaCha20 stream derived from the master seed. Chunks may
//! run on any number of threads; partial sums are combined in chunk order, so
//! results are bit-identical for a given `(seed, n_samples)`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::SmallBallProfile;
use crate::error::{BoundError, Result};
use crate::informativity::DiscreteProblem;

pub const MC_CHUNKS: usize = 64;
pub const MIN_MC_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Exact,
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub risk: f64,
    pub kind: OracleKind,
    pub std_error: Option<f64>,
    pub seed: Option<u64>,
    pub n_samples: Option<usize>,
}

impl OracleResult {
    fn exact(risk: f64) -> Self {
        Self {
            risk,
            kind: OracleKind::Exact,
            std_error: None,
            seed: None,
            n_samples: None,
        }
    }

    /// `risk + k · std_error`, or the risk itself for non-random oracles.
    pub fn upper(&self, k: f64) -> f64 {
        self.risk + k * self.std_error.unwrap_or(0.0)
    }
}

/// Bayes action for each observation; ties go to the lowest action index.
pub fn bayes_rule(problem: &DiscreteProblem) -> Vec<usize> {
    let w = problem.prior().weights();
    bayes_rule_with(problem, w)
}

fn bayes_rule_with(problem: &DiscreteProblem, w: &[f64]) -> Vec<usize> {
    (0..problem.n_obs())
        .map(|x| {
            let mut best = (0usize, f64::INFINITY);
            for a in 0..problem.n_actions() {
                let cost: f64 = (0..problem.n_params())
                    .map(|t| w[t] * problem.row(t)[x] * problem.loss()[t][a])
                    .sum();
                if cost < best.1 {
                    best = (a, cost);
                }
            }
            best.0
        })
        .collect()
}

fn risk_at(problem: &DiscreteProblem, rule: &[usize], theta: usize) -> f64 {
    problem
        .row(theta)
        .iter()
        .zip(rule)
        .map(|(p, &a)| p * problem.loss()[theta][a])
        .sum()
}

/// `inf_δ Σ_θ w(θ) E_θ L(θ, δ(X))`, solved per observation.
pub fn exact_bayes_risk(problem: &DiscreteProblem) -> OracleResult {
    let rule = bayes_rule(problem);
    let w = problem.prior().weights();
    let risk = (0..problem.n_params())
        .map(|t| w[t] * risk_at(problem, &rule, t))
        .sum();
    OracleResult::exact(risk)
}

/// Worst-case risk of the uniform-prior Bayes rule; an upper bound on the
/// minimax risk.
pub fn exact_minimax_upper(problem: &DiscreteProblem) -> OracleResult {
    let n = problem.n_params();
    let uniform = vec![1.0 / n as f64; n];
    let rule = bayes_rule_with(problem, &uniform);
    let risk = (0..n)
        .map(|t| risk_at(problem, &rule, t))
        .fold(0.0, f64::max);
    OracleResult::exact(risk)
}

/// Squared-loss Bayes risk for `θ ~ N(0, τ²I)`, `X ~ N(θ, σ²I)`.
pub fn gaussian_conjugate_bayes_risk(d: usize, sigma: f64, tau: f64) -> Result<OracleResult> {
    if d == 0 || !(sigma > 0.0) || !(tau > 0.0) {
        return Err(BoundError::InvalidProblem(format!(
            "need d >= 1, sigma > 0, tau > 0 (got {d}, {sigma}, {tau})"
        )));
    }
    let (s2, t2) = (sigma * sigma, tau * tau);
    let risk = if t2.is_infinite() {
        d as f64 * s2
    } else {
        d as f64 * s2 * t2 / (s2 + t2)
    };
    Ok(OracleResult {
        risk,
        kind: OracleKind::ClosedForm,
        std_error: None,
        seed: None,
        n_samples: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocationPrior {
    UniformBall { gamma: f64 },
    Gaussian { tau: f64 },
}

/// Models that can be simulated.
#[derive(Debug, Clone, PartialEq)]
pub enum McFamily {
    /// `X ~ N(θ, σ²I)`, squared Euclidean loss. `σ = 0` is allowed.
    GaussianLocation { d: usize, sigma: f64, prior: LocationPrior },
    /// `n` draws from `N(0, I + θθᵀ)`, `θ` uniform on the unit ball, loss
    /// `‖θ - a‖^p`.
    SpikedCovariance { n: usize, d: usize, p: f64 },
    /// Logistic responses with `θ ~ N(0, τ²I)`, loss `‖θ - a‖^p`.
    LogisticGlm { design: DMatrix<f64>, tau: f64, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    PosteriorMeanGrid,
    Mle,
    ProjectionLse,
    PcaTop,
    /// Penalized logistic regression with penalty `(λ/2)‖θ‖²`.
    RidgeLogistic { lambda: f64 },
}

fn normal_vec(rng: &mut ChaCha20Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn uniform_ball(rng: &mut ChaCha20Rng, d: usize, radius: f64) -> DVector<f64> {
    let mut z = normal_vec(rng, d);
    while z.norm() == 0.0 {
        z = normal_vec(rng, d);
    }
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / d as f64);
    let norm = z.norm();
    z * (r / norm)
}

fn sample_location_prior(rng: &mut ChaCha20Rng, d: usize, prior: &LocationPrior) -> DVector<f64> {
    match prior {
        LocationPrior::UniformBall { gamma } => uniform_ball(rng, d, *gamma),
        LocationPrior::Gaussian { tau } => normal_vec(rng, d) * *tau,
    }
}

fn chunk_sizes(n: usize) -> Vec<usize> {
    let base = n / MC_CHUNKS;
    let extra = n % MC_CHUNKS;
    (0..MC_CHUNKS).map(|k| base + usize::from(k < extra)).collect()
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mean and standard error of `draw` over `n` samples.
pub fn mc_mean<F>(n: usize, seed: u64, draw: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha20Rng) -> f64 + Sync,
{
    let sizes = chunk_sizes(n);
    let partial: Vec<(f64, f64)> = sizes
        .par_iter()
        .enumerate()
        .map(|(k, &m)| {
            let mut rng = stream_rng(seed, k as u64);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..m {
                let v = draw(&mut rng);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = partial
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let nf = n as f64;
    let mean = s / nf;
    let var = ((s2 / nf - mean * mean) * nf / (nf - 1.0).max(1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

fn grid_posterior_mean(x: &DVector<f64>, sigma: f64, prior: &LocationPrior) -> DVector<f64> {
    let d = x.len();
    let per_axis = 64usize;
    let (half_width, ball, inv_t2) = match prior {
        LocationPrior::UniformBall { gamma } => (*gamma, Some(gamma * gamma), 0.0),
        LocationPrior::Gaussian { tau } => (5.0 * tau, None, 1.0 / (tau * tau)),
    };
    let step = 2.0 * half_width / per_axis as f64;
    let axis: Vec<f64> = (0..per_axis)
        .map(|k| -half_width + step * (k as f64 + 0.5))
        .collect();
    let total = per_axis.pow(d as u32);
    let inv_s2 = 1.0 / (sigma * sigma);
    let mut g = vec![0.0; d];
    let mut log_w = Vec::with_capacity(total);
    let node = |idx: usize, g: &mut [f64]| {
        let mut rem = idx;
        for v in g.iter_mut() {
            *v = axis[rem % per_axis];
            rem /= per_axis;
        }
    };
    for idx in 0..total {
        node(idx, &mut g);
        let norm2: f64 = g.iter().map(|v| v * v).sum();
        let dist2: f64 = g.iter().zip(x.iter()).map(|(a, b)| (a - b).powi(2)).sum();
        let prior_lw = match ball {
            Some(r2) if norm2 > r2 => f64::NEG_INFINITY,
            Some(_) => 0.0,
            None => -0.5 * norm2 * inv_t2,
        };
        log_w.push(prior_lw - 0.5 * dist2 * inv_s2);
    }
    let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return x.clone();
    }
    let mut acc = DVector::zeros(d);
    let mut mass = 0.0;
    for (idx, lw) in log_w.iter().enumerate() {
        let w = (lw - top).exp();
        if w == 0.0 {
            continue;
        }
        node(idx, &mut g);
        for (a, v) in acc.iter_mut().zip(&g) {
            *a += w * v;
        }
        mass += w;
    }
    acc / mass
}

fn weighted_mean(points: &[DVector<f64>], log_w: &[f64]) -> Option<DVector<f64>> {
    let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return None;
    }
    let mut acc = DVector::zeros(points[0].len());
    let mut total = 0.0;
    for (p, lw) in points.iter().zip(log_w) {
        let w = (lw - top).exp();
        acc += p * w;
        total += w;
    }
    Some(acc / total)
}

fn importance_posterior_mean(
    rng: &mut ChaCha20Rng,
    x: &DVector<f64>,
    sigma: f64,
    prior: &LocationPrior,
) -> DVector<f64> {
    let draws = 512;
    let points: Vec<DVector<f64>> = (0..draws)
        .map(|_| sample_location_prior(rng, x.len(), prior))
        .collect();
    let log_w: Vec<f64> = points
        .iter()
        .map(|t| -(x - t).norm_squared() / (2.0 * sigma * sigma))
        .collect();
    weighted_mean(&points, &log_w).unwrap_or_else(|| x.clone())
}

fn project_ball(x: DVector<f64>, radius: f64) -> DVector<f64> {
    let n = x.norm();
    if n > radius {
        x * (radius / n)
    } else {
        x
    }
}

fn top_eigen(s: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = s.clone().symmetric_eigen();
    let (k, lambda) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let mut v = eig.eigenvectors.column(k).into_owned();
    // fix the sign so that the estimate is a function of the data alone
    let lead = v.iter().copied().fold(0.0f64, |acc, c| if c.abs() > acc.abs() { c } else { acc });
    if lead < 0.0 {
        v = -v;
    }
    (lambda, v)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Newton iterations for `min Σ_i [log(1 + e^{x_iᵀθ}) - y_i x_iᵀθ] + (λ/2)‖θ‖²`.
pub fn ridge_logistic_fit(design: &DMatrix<f64>, y: &[f64], lambda: f64) -> DVector<f64> {
    let d = design.ncols();
    let mut theta = DVector::zeros(d);
    for _ in 0..100 {
        let eta = design * &theta;
        let mut grad = &theta * lambda;
        let mut hess = DMatrix::identity(d, d) * lambda;
        for i in 0..design.nrows() {
            let mu = sigmoid(eta[i]);
            let xi = design.row(i).transpose();
            grad += &xi * (mu - y[i]);
            hess += &xi * xi.transpose() * (mu * (1.0 - mu));
        }
        let Some(step) = hess.cholesky().map(|c| c.solve(&grad)) else {
            break;
        };
        theta -= &step;
        if step.norm() < 1e-12 * (1.0 + theta.norm()) {
            break;
        }
    }
    theta
}

/// Integrated risk `E L(θ, δ(X))` of a fixed estimator under the family's
/// prior; an upper bound on the Bayes risk.
pub fn mc_integrated_risk(
    family: &McFamily,
    estimator: Estimator,
    n_samples: usize,
    seed: u64,
) -> Result<OracleResult> {
    if n_samples < MIN_MC_SAMPLES {
        return Err(BoundError::OutOfRange {
            name: "n_samples",
            value: n_samples as f64,
            expected: "n_samples >= 1000",
        });
    }
    let unsupported = || {
        Err(BoundError::Unsupported(format!(
            "estimator {estimator:?} is not defined for this family"
        )))
    };
    let (mean, se) = match family {
        McFamily::GaussianLocation { d, sigma, prior } => {
            let (d, sigma) = (*d, *sigma);
            if d == 0 || !(sigma >= 0.0) {
                return Err(BoundError::InvalidProblem("need d >= 1 and sigma >= 0".into()));
            }
            match estimator {
                Estimator::Mle | Estimator::ProjectionLse | Estimator::PosteriorMeanGrid => {}
                _ => return unsupported(),
            }
            let prior = prior.clone();
            mc_mean(n_samples, seed, move |rng| {
                let theta = sample_location_prior(rng, d, &prior);
                let x = &theta + normal_vec(rng, d) * sigma;
                let est = if sigma == 0.0 {
                    x
                } else {
                    match estimator {
                        Estimator::Mle => x,
                        Estimator::ProjectionLse => match prior {
                            LocationPrior::UniformBall { gamma } => project_ball(x, gamma),
                            LocationPrior::Gaussian { .. } => x,
                        },
                        _ if d <= 2 => grid_posterior_mean(&x, sigma, &prior),
                        _ => importance_posterior_mean(rng, &x, sigma, &prior),
                    }
                };
                (theta - est).norm_squared()
            })
        }
        McFamily::SpikedCovariance { n, d, p } => {
            if estimator != Estimator::PcaTop {
                return unsupported();
            }
            let (n, d, p) = (*n, *d, *p);
            mc_mean(n_samples, seed, move |rng| {
                let theta = uniform_ball(rng, d, 1.0);
                let mut s = DMatrix::<f64>::zeros(d, d);
                for _ in 0..n {
                    let g: f64 = rng.sample(StandardNormal);
                    let x = normal_vec(rng, d) + &theta * g;
                    s += &x * x.transpose();
                }
                s /= n as f64;
                let (lambda, v) = top_eigen(&s);
                let est = project_ball(v * (lambda - 1.0).max(0.0).sqrt(), 1.0);
                (theta - est).norm().powf(p)
            })
        }
        McFamily::LogisticGlm { design, tau, p } => {
            let Estimator::RidgeLogistic { lambda } = estimator else {
                return unsupported();
            };
            let (tau, p) = (*tau, *p);
            let d = design.ncols();
            mc_mean(n_samples, seed, move |rng| {
                let theta = normal_vec(rng, d) * tau;
                let eta = design * &theta;
                let y: Vec<f64> = eta
                    .iter()
                    .map(|&e| if rng.random::<f64>() < sigmoid(e) { 1.0 } else { 0.0 })
                    .collect();
                let est = ridge_logistic_fit(design, &y, lambda);
                (theta - est).norm().powf(p)
            })
        }
    };
    Ok(OracleResult {
        risk: mean,
        kind: OracleKind::MonteCarlo,
        std_error: Some(se),
        seed: Some(seed),
        n_samples: Some(n_samples),
    })
}

/// Monte Carlo estimate of `t ↦ sup_a w{θ : ‖θ - a‖² < t}` for a Gaussian
/// location prior, with the supremum over a fixed set of candidate centers
/// (the prior mean plus points along the first axis).
pub fn small_ball_profile_mc(
    family: &McFamily,
    t_grid: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<SmallBallProfile> {
    let McFamily::GaussianLocation { d, prior, .. } = family else {
        return Err(BoundError::Unsupported(
            "small-ball profiles are simulated for Gaussian location priors only".into(),
        ));
    };
    if t_grid.is_empty() {
        return Err(BoundError::InvalidProblem("empty radius grid".into()));
    }
    let d = *d;
    let scale = match prior {
        LocationPrior::UniformBall { gamma } => *gamma,
        LocationPrior::Gaussian { tau } => *tau,
    };
    let centers: Vec<DVector<f64>> = [0.0, 0.25, -0.25, 0.5, -0.5]
        .iter()
        .map(|&c| {
            let mut v = DVector::zeros(d);
            v[0] = c * scale;
            v
        })
        .collect();
    let mut rng = stream_rng(seed, 0);
    let thetas: Vec<DVector<f64>> = (0..n_samples)
        .map(|_| sample_location_prior(&mut rng, d, prior))
        .collect();
    let mut running = 0.0f64;
    let mass: Vec<f64> = t_grid
        .iter()
        .map(|&t| {
            let best = centers
                .iter()
                .map(|a| thetas.iter().filter(|th| (*th - a).norm_squared() < t).count())
                .max()
                .unwrap_or(0);
            running = running.max(best as f64 / n_samples as f64);
            running
        })
        .collect();
    SmallBallProfile::tabulated(t_grid.to_vec(), mass)
}

/// Monte Carlo estimate of `E‖Z‖` for `Z ~ N(0, I_d)` under the ℓ_q norm.
pub fn expected_norm_mc(d: usize, q: f64, n_samples: usize, seed: u64) -> (f64, f64) {
    mc_mean(n_samples, seed, move |rng| {
        let z = normal_vec(rng, d);
        if q.is_infinite() {
            z.amax()
        } else {
            z.iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::r0;
    use approx::assert_abs_diff_eq;

    fn bsc(p: f64) -> DiscreteProblem {
        DiscreteProblem::zero_one(vec![vec![1.0 - p, p], vec![p, 1.0 - p]], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn exact_bayes_examples() {
        let orth = DiscreteProblem::zero_one(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.5, 0.5]).unwrap();
        assert_eq!(exact_bayes_risk(&orth).risk, 0.0);
        for &p in &[0.0, 0.1, 0.3, 0.5] {
            assert_abs_diff_eq!(exact_bayes_risk(&bsc(p)).risk, p, epsilon = 1e-15);
        }
        let none = DiscreteProblem::zero_one(vec![vec![0.4, 0.6]; 3], vec![0.5, 0.3, 0.2]).unwrap();
        assert_abs_diff_eq!(exact_bayes_risk(&none).risk, r0(&none).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn minimax_upper_examples() {
        let same = DiscreteProblem::zero_one(vec![vec![0.5, 0.5]; 3], vec![1.0 / 3.0; 3]).unwrap();
        assert_eq!(exact_minimax_upper(&same).risk, 1.0);
        let orth = DiscreteProblem::zero_one(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.9, 0.1]).unwrap();
        assert_eq!(exact_minimax_upper(&orth).risk, 0.0);
        assert_abs_diff_eq!(exact_minimax_upper(&bsc(0.2)).risk, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn conjugate_examples() {
        assert_abs_diff_eq!(gaussian_conjugate_bayes_risk(2, 1.0, 1.0).unwrap().risk, 1.0, epsilon = 1e-15);
        let big = gaussian_conjugate_bayes_risk(3, 1.0, 1e8).unwrap().risk;
        assert_abs_diff_eq!(big, 3.0, epsilon = 1e-9);
        assert!(gaussian_conjugate_bayes_risk(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn mc_is_deterministic_per_seed() {
        let fam = McFamily::GaussianLocation {
            d: 3,
            sigma: 1.0,
            prior: LocationPrior::UniformBall { gamma: 2.0 },
        };
        let a = mc_integrated_risk(&fam, Estimator::ProjectionLse, 5000, 11).unwrap();
        let b = mc_integrated_risk(&fam, Estimator::ProjectionLse, 5000, 11).unwrap();
        assert_eq!(a, b);
        let c = mc_integrated_risk(&fam, Estimator::ProjectionLse, 5000, 12).unwrap();
        assert_ne!(a.risk, c.risk);
    }

    #[test]
    fn mc_independent_of_thread_count() {
        let fam = McFamily::GaussianLocation {
            d: 2,
            sigma: 0.5,
            prior: LocationPrior::Gaussian { tau: 1.0 },
        };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| mc_integrated_risk(&fam, Estimator::Mle, 4000, 5).unwrap());
        let b = four.install(|| mc_integrated_risk(&fam, Estimator::Mle, 4000, 5).unwrap());
        assert_eq!(a.risk.to_bits(), b.risk.to_bits());
    }

    #[test]
    fn mc_zero_noise_is_zero() {
        let fam = McFamily::GaussianLocation {
            d: 2,
            sigma: 0.0,
            prior: LocationPrior::UniformBall { gamma: 1.0 },
        };
        let r = mc_integrated_risk(&fam, Estimator::PosteriorMeanGrid, 1000, 1).unwrap();
        assert_eq!(r.risk, 0.0);
    }

    #[test]
    fn mc_rejects_unknown_pairs() {
        let fam = McFamily::SpikedCovariance { n: 10, d: 2, p: 2.0 };
        assert!(matches!(
            mc_integrated_risk(&fam, Estimator::Mle, 1000, 1),
            Err(BoundError::Unsupported(_))
        ));
        let loc = McFamily::GaussianLocation {
            d: 1,
            sigma: 1.0,
            prior: LocationPrior::Gaussian { tau: 1.0 },
        };
        assert!(mc_integrated_risk(&loc, Estimator::Mle, 10, 1).is_err());
    }

    #[test]
    fn posterior_mean_matches_conjugate_risk() {
        let fam = McFamily::GaussianLocation {
            d: 2,
            sigma: 1.0,
            prior: LocationPrior::Gaussian { tau: 1.0 },
        };
        let mc = mc_integrated_risk(&fam, Estimator::PosteriorMeanGrid, 100_000, 3).unwrap();
        let exact = gaussian_conjugate_bayes_risk(2, 1.0, 1.0).unwrap().risk;
        let se = mc.std_error.unwrap();
        assert!((mc.risk - exact).abs() <= 3.0 * se, "{} vs {exact} (se {se})", mc.risk);
    }

    #[test]
    fn std_error_halves_with_four_times_samples() {
        let fam = McFamily::GaussianLocation {
            d: 2,
            sigma: 1.0,
            prior: LocationPrior::Gaussian { tau: 2.0 },
        };
        let a = mc_integrated_risk(&fam, Estimator::Mle, 10_000, 9).unwrap().std_error.unwrap();
        let b = mc_integrated_risk(&fam, Estimator::Mle, 40_000, 9).unwrap().std_error.unwrap();
        let ratio = a / b;
        assert!((1.8..2.2).contains(&ratio), "{ratio}");
        let c = mc_integrated_risk(&fam, Estimator::Mle, 20_000, 9).unwrap().std_error.unwrap();
        let ratio = a / c;
        assert!((1.3..1.55).contains(&ratio), "{ratio}");
    }

    #[test]
    fn small_ball_profile_uniform_ball() {
        let gamma = 2.0;
        let fam = McFamily::GaussianLocation {
            d: 2,
            sigma: 1.0,
            prior: LocationPrior::UniformBall { gamma },
        };
        let grid = [0.25, 1.0, 2.0, 16.0, 17.0];
        let n = 20_000;
        let prof = small_ball_profile_mc(&fam, &grid, n, 4).unwrap();
        for &t in &grid[..3] {
            let exact = t / (gamma * gamma);
            let se = (exact * (1.0 - exact) / n as f64).sqrt();
            assert!((prof.mass_at(t) - exact).abs() <= 3.0 * se + 1e-12, "t={t}");
        }
        assert_eq!(prof.mass_at(17.0), 1.0);
        let zero = small_ball_profile_mc(&fam, &[1e-12], n, 4).unwrap();
        assert_eq!(zero.mass_at(1e-12), 0.0);
    }

    #[test]
    fn ridge_logistic_recovers_signal() {
        let n = 400;
        let design = DMatrix::from_fn(n, 2, |i, j| if i % 2 == j { 1.5 } else { 0.0 });
        let theta = DVector::from_vec(vec![1.0, -0.5]);
        let eta = &design * &theta;
        let y: Vec<f64> = (0..n).map(|i| if (i * 7919 % 1000) as f64 / 1000.0 < sigmoid(eta[i]) { 1.0 } else { 0.0 }).collect();
        let est = ridge_logistic_fit(&design, &y, 1e-3);
        assert!((est - theta).norm() < 0.5);
    }

    #[test]
    fn expected_l1_norm() {
        let (m, se) = expected_norm_mc(4, 1.0, 20_000, 2);
        let exact = 4.0 * (2.0 / std::f64::consts::PI).sqrt();
        assert!((m - exact).abs() < 4.0 * se);
    }
}
