//! Example families and their end-to-end bound pipelines.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::bounds::{
    default_c_grid, density_partition_bound, general_bound, sharpened_general_bound, BoundReport,
    SmallBallProfile,
};
use crate::covering::{gaussian_location_chi2_cover, gaussian_location_kl_cover, spiked_covariance_chi2_cover};
use crate::divergence::{min_eigenvalue, ConvexGenerator};
use crate::error::{BoundError, Result};
use crate::informativity::{
    default_epsilon_grid, power_covering_bound, yang_barron_bound, DiscreteProblem, InformativityEstimate,
};

/// Volume of the Euclidean unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_d = (2π/d) V_{d-2}
    let mut v = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyPrior {
    UniformBall { gamma: f64 },
    Gaussian { tau: f64 },
    /// Any prior with Lebesgue density at most `w` and per-coordinate
    /// variance `v` about its center.
    BoundedDensity { w: f64, v: f64 },
}

/// `X ~ N(θ, σ²I_d)` with a prior on `θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianLocationFamily {
    pub d: usize,
    pub sigma: f64,
    pub prior: FamilyPrior,
}

impl GaussianLocationFamily {
    pub fn new(d: usize, sigma: f64, prior: FamilyPrior) -> Result<Self> {
        if d == 0 {
            return Err(BoundError::InvalidProblem("dimension must be at least 1".into()));
        }
        if !(sigma > 0.0) {
            return Err(BoundError::OutOfRange {
                name: "sigma",
                value: sigma,
                expected: "sigma > 0",
            });
        }
        match prior {
            FamilyPrior::UniformBall { gamma } if !(gamma > 0.0) => {
                return Err(BoundError::OutOfRange {
                    name: "gamma",
                    value: gamma,
                    expected: "gamma > 0",
                })
            }
            FamilyPrior::Gaussian { tau } if !(tau > 0.0) => {
                return Err(BoundError::OutOfRange {
                    name: "tau",
                    value: tau,
                    expected: "tau > 0",
                })
            }
            FamilyPrior::BoundedDensity { w, v } if !(w > 0.0) || !(v >= 0.0) => {
                return Err(BoundError::InvalidProblem(format!(
                    "bounded density needs w > 0 and v >= 0, got w = {w}, v = {v}"
                )))
            }
            _ => {}
        }
        Ok(Self { d, sigma, prior })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniformBallRoute {
    Chi2,
    KlNaive,
    KlPartitioned,
}

impl UniformBallRoute {
    pub fn as_str(&self) -> &'static str {
        match self {
            UniformBallRoute::Chi2 => "chi2",
            UniformBallRoute::KlNaive => "kl_naive",
            UniformBallRoute::KlPartitioned => "kl_partitioned",
        }
    }
}

fn uniform_ball_profile(gamma: f64, d: usize) -> SmallBallProfile {
    SmallBallProfile::from_fn(
        move |t: f64| (t.sqrt() / gamma).powi(d as i32).min(1.0),
        Some(4.0 * gamma * gamma),
    )
}

/// Squared-loss Bayes risk bounds for the uniform prior on a radius-`Γ`
/// ball.
///
/// * `Chi2`: χ² covering bound plus the small-ball mass `(√t/Γ)^d`; the
///   larger of the plain and `c`-sharpened general bounds is returned.
/// * `KlNaive`: the same with the KL covering (Yang–Barron) bound, whose
///   value scales as `d²σ⁴/Γ²`.
/// * `KlPartitioned`: the local density-ratio bound with `r_δ ≡ 1`,
///   `A = 1/(2σ²)`, `p = 2` at `δ = √2 σ`.
pub fn uniform_ball_pipeline(family: &GaussianLocationFamily, route: UniformBallRoute) -> Result<BoundReport> {
    let FamilyPrior::UniformBall { gamma } = family.prior else {
        return Err(BoundError::Unsupported("this pipeline needs a uniform-ball prior".into()));
    };
    let (d, sigma) = (family.d, family.sigma);
    let df = d as f64;
    let name = format!("uniform_ball_{}", route.as_str());
    match route {
        UniformBallRoute::Chi2 => {
            if gamma < sigma * df.sqrt() {
                return Err(BoundError::Precondition(format!(
                    "gamma = {gamma} is below sigma sqrt(d) = {}",
                    sigma * df.sqrt()
                )));
            }
            let reference_eps = df.exp_m1().sqrt();
            let mut grid = default_epsilon_grid();
            grid.push(reference_eps);
            let oracle = |e: f64| {
                gaussian_location_chi2_cover(gamma, sigma, d, e)
                    .map(|c| c.count)
                    .unwrap_or(f64::INFINITY)
            };
            let est = power_covering_bound(2.0, oracle, &grid)?;
            let reference = (3.0 * std::f64::consts::E * gamma / (sigma * df.sqrt())).powi(d as i32) - 1.0;
            let profile = uniform_ball_profile(gamma, d);
            let chi2 = ConvexGenerator::chi2();
            let plain = general_bound(&chi2, est.value, &profile)?;
            let sharp = sharpened_general_bound(&chi2, est.value, &profile, &default_c_grid())?;
            let best = if sharp.value > plain.value { sharp } else { plain.clone() };
            let mut r = BoundReport::new(&name, best.value)
                .with_f("chi2")
                .with_param("plain", plain.value)
                .with_param("reference_informativity", reference)
                .with_param("scaled", best.value / (df * sigma * sigma));
            if let Some(c) = best.parameters.get("c") {
                r = r.with_param("c", *c);
            }
            Ok(r.with_informativity(est))
        }
        UniformBallRoute::KlNaive => {
            let mut grid = default_epsilon_grid();
            grid.push((df / 2.0).sqrt());
            let oracle = |e: f64| {
                gaussian_location_kl_cover(gamma, sigma, d, e)
                    .map(|c| c.count)
                    .unwrap_or(f64::INFINITY)
            };
            let est = yang_barron_bound(oracle, &grid)?;
            let profile = uniform_ball_profile(gamma, d);
            let b = general_bound(&ConvexGenerator::kl(), est.value, &profile)?;
            Ok(BoundReport::new(&name, b.value)
                .with_f("kl")
                .with_param("scaled", b.value / (df * sigma * sigma))
                .with_informativity(est))
        }
        UniformBallRoute::KlPartitioned => {
            let a_const = 1.0 / (2.0 * sigma * sigma);
            let cap = std::f64::consts::SQRT_2 * sigma;
            let deltas = [cap / 4.0, cap / 2.0, cap];
            let b = density_partition_bound(a_const, unit_ball_volume(d), 2.0, d, |_| 1.0, &deltas)?;
            let mut r = BoundReport::new(&name, b.value)
                .with_f("kl")
                .with_param("scaled", b.value / (df * sigma * sigma));
            r.parameters.extend(b.parameters);
            Ok(r)
        }
    }
}

/// Exponential-family regression `Y_i | θ` with natural parameter `x_iᵀθ`,
/// dispersion `a(φ)`, `b'' ≤ K`, and prior `N(0, τ²I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlmModel {
    pub design: DMatrix<f64>,
    pub a_phi: f64,
    pub curvature_cap: f64,
    pub tau: f64,
    pub lambda_max: f64,
}

impl GlmModel {
    pub fn new(design: DMatrix<f64>, a_phi: f64, curvature_cap: f64, tau: f64) -> Result<Self> {
        if design.nrows() == 0 || design.ncols() == 0 {
            return Err(BoundError::InvalidProblem("empty design".into()));
        }
        for (name, v) in [("a_phi", a_phi), ("curvature_cap", curvature_cap), ("tau", tau)] {
            if !(v > 0.0) {
                return Err(BoundError::InvalidProblem(format!("{name} must be positive, got {v}")));
            }
        }
        let gram = design.transpose() * &design / design.nrows() as f64;
        let lambda_max = -min_eigenvalue(&(-gram));
        Ok(Self {
            design,
            a_phi,
            curvature_cap,
            tau,
            lambda_max,
        })
    }

    pub fn n(&self) -> usize {
        self.design.nrows()
    }

    pub fn d(&self) -> usize {
        self.design.ncols()
    }
}

/// Design whose rows cycle through `√d e_j`, so `XᵀX/n = I` when `d | n`.
pub fn orthogonal_design(n: usize, d: usize) -> DMatrix<f64> {
    let s = (d as f64).sqrt();
    DMatrix::from_fn(n, d, |i, j| if i % d == j { s } else { 0.0 })
}

/// Bayes risk bound for `‖θ - a‖^p` in the regression model, from the
/// local density-ratio bound with `A = nKλ_max/(2a(φ))`,
/// `δ² = min(1/A, τ²)` and `∫ r_δ^{-p/d} dw ≥ (3/4) exp(-(pδ²/(2τ²) + 4pδ/τ))`.
pub fn glm_bound(model: &GlmModel, p_exponent: f64) -> Result<BoundReport> {
    if !(p_exponent > 0.0) {
        return Err(BoundError::OutOfRange {
            name: "p",
            value: p_exponent,
            expected: "p > 0",
        });
    }
    let (n, d) = (model.n() as f64, model.d());
    let p = p_exponent;
    let a_const = n * model.curvature_cap * model.lambda_max / (2.0 * model.a_phi);
    let delta = (1.0 / a_const).min(model.tau * model.tau).sqrt();
    let tau = model.tau;
    let integral = move |dl: f64| 0.75 * (-(p * dl * dl / (2.0 * tau * tau) + 4.0 * p * dl / tau)).exp();
    let b = density_partition_bound(a_const, unit_ball_volume(d), p, d, integral, &[delta])?;
    let rate = (d as f64 * (model.a_phi / (n * model.curvature_cap)).min(tau * tau)).powf(p / 2.0);
    let mut r = BoundReport::new("glm", b.value)
        .with_f("kl")
        .with_param("a_const", a_const)
        .with_param("rate", rate)
        .with_param("constant", b.value / rate)
        .with_param("lambda_max", model.lambda_max);
    r.parameters.extend(b.parameters);
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpikedCovarianceFamily {
    pub n: usize,
    pub d: usize,
}

impl SpikedCovarianceFamily {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(BoundError::InvalidProblem("n and d must be at least 1".into()));
        }
        if 2 * n < d {
            return Err(BoundError::Precondition(format!("n = {n} is below d/2")));
        }
        Ok(Self { n, d })
    }
}

/// `χ²` route for the rank-one spiked covariance model with the uniform prior
/// on the unit ball and loss `‖θ - a‖^p`: the covering bound at
/// `log(1 + ε²) = min(n/2, d)` gives `I`, and the bound is
/// `½ (4(1 + I))^{-p/d}`.
pub fn spiked_bound(family: &SpikedCovarianceFamily, p_exponent: f64) -> Result<BoundReport> {
    let fam = SpikedCovarianceFamily::new(family.n, family.d)?;
    if !(p_exponent > 0.0) {
        return Err(BoundError::OutOfRange {
            name: "p",
            value: p_exponent,
            expected: "p > 0",
        });
    }
    let (n, d, p) = (fam.n as f64, fam.d, p_exponent);
    let df = d as f64;
    let level = (n / 2.0).min(df);
    let eps = level.exp_m1().sqrt();
    let cover = spiked_covariance_chi2_cover(fam.n, d, eps)?;
    let i_up = level.exp() * (36.0 * (n / df).max(2.0)).powf(df / 2.0) - 1.0;
    let mut est = InformativityEstimate::upper(i_up, "spiked_chi2_covering");
    est.epsilon_used = Some(eps);
    let profile = SmallBallProfile::from_fn(move |t: f64| t.powf(df / p).min(1.0), Some(1.0));
    let b = general_bound(&ConvexGenerator::chi2(), i_up, &profile)?;
    let closed = 0.5 * (4.0 * (1.0 + i_up)).powf(-p / df);
    let floor = 0.5 * (24.0 * std::f64::consts::E).powf(-p) * (0.5f64).min(df / n).powf(p / 2.0);
    let mut r = BoundReport::new("spiked", b.value)
        .with_f("chi2")
        .with_param("closed_form", closed)
        .with_param("explicit_floor", floor)
        .with_param("cover_count", cover.count)
        .with_informativity(est);
    if b.value < floor {
        r.valid = false;
        r.reason = Some(format!("bound {} fell below the explicit floor {floor}", b.value));
    }
    Ok(r)
}

/// Squared-loss bound for a prior with density at most `W`: mutual
/// information is at most `(d/2) log((σ² + V)/σ²)` and the small-ball mass
/// is at most `W Vol(B) t^{d/2} κ^d`, where `κ = E‖Z‖_* / √d` when the loss
/// uses a general norm with dual norm `‖·‖_*` (pass its Gaussian mean), and
/// `κ = 1` for the Euclidean norm.
pub fn bounded_density_gaussian_bound(
    family: &GaussianLocationFamily,
    dual_norm_expectation: Option<f64>,
) -> Result<BoundReport> {
    let FamilyPrior::BoundedDensity { w, v } = family.prior else {
        return Err(BoundError::Unsupported("this pipeline needs a bounded-density prior".into()));
    };
    let (d, s2) = (family.d, family.sigma * family.sigma);
    let df = d as f64;
    let kappa = match dual_norm_expectation {
        Some(e) if e > 0.0 => e / df.sqrt(),
        Some(e) => {
            return Err(BoundError::OutOfRange {
                name: "dual_norm_expectation",
                value: e,
                expected: "positive",
            })
        }
        None => 1.0,
    };
    let i_up = df / 2.0 * ((s2 + v) / s2).ln();
    let scale = w * unit_ball_volume(d) * kappa.powi(d as i32);
    let profile = SmallBallProfile::from_fn(move |t: f64| (scale * t.powf(df / 2.0)).min(1.0), None);
    let b = general_bound(&ConvexGenerator::kl(), i_up, &profile)?;
    let rate = df * s2 * s2 * w.powf(-2.0 / df) / (s2 + v).powi(2);
    Ok(BoundReport::new(if dual_norm_expectation.is_some() { "bounded_density_norm" } else { "bounded_density" }, b.value)
        .with_f("kl")
        .with_param("rate", rate)
        .with_param("kappa", kappa)
        .with_informativity(InformativityEstimate::upper(i_up, "gaussian_center")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiscreteKind {
    /// Binary symmetric channel with crossover `p`, uniform prior.
    Bsc { p: f64 },
    /// Dirichlet rows and prior; zero-one loss (`general_loss = false`) or
    /// uniform losses in `[0, 1)` with exact zeros sprinkled in.
    Random {
        n_params: usize,
        n_obs: usize,
        n_actions: usize,
        general_loss: bool,
    },
    /// `P_i = δ_i`, uniform prior.
    Orthogonal { n: usize },
    /// All rows equal, uniform prior.
    NoData { n: usize, m: usize },
}

fn dirichlet(rng: &mut ChaCha20Rng, k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    // occasional exact zeros exercise the boundary conventions
    if k > 1 && rng.random::<f64>() < 0.25 {
        let j = rng.random_range(0..k);
        v[j] = 0.0;
    }
    let total: f64 = v.iter().sum();
    if total == 0.0 {
        return vec![1.0 / k as f64; k];
    }
    let mut out: Vec<f64> = v.iter().map(|x| x / total).collect();
    // absorb rounding so the weights sum to one within the simplex tolerance
    let drift: f64 = 1.0 - out.iter().sum::<f64>();
    let top = (0..k).max_by(|&a, &b| out[a].total_cmp(&out[b])).unwrap_or(0);
    out[top] += drift;
    out
}

/// Fixture factory for finite problems.
pub fn make_discrete(kind: DiscreteKind, seed: u64) -> Result<DiscreteProblem> {
    match kind {
        DiscreteKind::Bsc { p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(BoundError::OutOfRange {
                    name: "p",
                    value: p,
                    expected: "p in [0, 1]",
                });
            }
            DiscreteProblem::zero_one(vec![vec![1.0 - p, p], vec![p, 1.0 - p]], vec![0.5, 0.5])
        }
        DiscreteKind::Orthogonal { n } => {
            if n == 0 {
                return Err(BoundError::InvalidProblem("n must be at least 1".into()));
            }
            let rows = (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            DiscreteProblem::zero_one(rows, vec![1.0 / n as f64; n])
        }
        DiscreteKind::NoData { n, m } => {
            if n == 0 || m == 0 {
                return Err(BoundError::InvalidProblem("sizes must be at least 1".into()));
            }
            DiscreteProblem::zero_one(vec![vec![1.0 / m as f64; m]; n], vec![1.0 / n as f64; n])
        }
        DiscreteKind::Random {
            n_params,
            n_obs,
            n_actions,
            general_loss,
        } => {
            if n_params == 0 || n_obs == 0 || n_actions == 0 {
                return Err(BoundError::InvalidProblem("sizes must be at least 1".into()));
            }
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let channel: Vec<Vec<f64>> = (0..n_params).map(|_| dirichlet(&mut rng, n_obs)).collect();
            let prior = dirichlet(&mut rng, n_params);
            let loss: Vec<Vec<f64>> = (0..n_params)
                .map(|t| {
                    (0..n_actions)
                        .map(|a| {
                            if general_loss {
                                let u: f64 = rng.random();
                                if u < 0.15 {
                                    0.0
                                } else {
                                    rng.random::<f64>()
                                }
                            } else if n_actions == n_params {
                                if t == a {
                                    0.0
                                } else {
                                    1.0
                                }
                            } else if rng.random::<f64>() < 0.3 {
                                0.0
                            } else {
                                1.0
                            }
                        })
                        .collect()
                })
                .collect();
            DiscreteProblem::new(channel, prior, loss)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::gaussian_conjugate_bayes_risk;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ball_volumes() {
        assert_abs_diff_eq!(unit_ball_volume(1), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(unit_ball_volume(2), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(unit_ball_volume(4), PI * PI / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn kl_partitioned_matches_closed_form() {
        for d in [1usize, 2, 3, 5] {
            let sigma = 0.7;
            let fam = GaussianLocationFamily::new(d, sigma, FamilyPrior::UniformBall { gamma: 10.0 }).unwrap();
            let r = uniform_ball_pipeline(&fam, UniformBallRoute::KlPartitioned).unwrap();
            let df = d as f64;
            let delta2 = 2.0 * sigma * sigma;
            let closed = 0.5 * (-4.0f64).exp() * 8f64.powf(-2.0 / df) * delta2 * unit_ball_volume(d).powf(-2.0 / df);
            assert_abs_diff_eq!(r.value, closed, epsilon = 1e-15);
        }
    }

    #[test]
    fn chi2_route_respects_proviso() {
        let fam = GaussianLocationFamily::new(4, 1.0, FamilyPrior::UniformBall { gamma: 1.0 }).unwrap();
        assert!(matches!(uniform_ball_pipeline(&fam, UniformBallRoute::Chi2), Err(BoundError::Precondition(_))));
        let fam = GaussianLocationFamily::new(2, 1.0, FamilyPrior::Gaussian { tau: 1.0 }).unwrap();
        assert!(uniform_ball_pipeline(&fam, UniformBallRoute::Chi2).is_err());
    }

    #[test]
    fn chi2_route_below_trivial_upper_bound() {
        for d in [1usize, 2, 4] {
            let gamma = 10.0 * (d as f64).sqrt();
            let fam = GaussianLocationFamily::new(d, 1.0, FamilyPrior::UniformBall { gamma }).unwrap();
            let r = uniform_ball_pipeline(&fam, UniformBallRoute::Chi2).unwrap();
            assert!(r.value <= d as f64 * 1.0f64.min(gamma * gamma));
            assert!(r.value > 0.0);
        }
    }

    #[test]
    fn kl_naive_scale() {
        // d²σ⁴/Γ² behaviour: doubling Γ divides the bound by about four
        let at = |gamma: f64| {
            let fam = GaussianLocationFamily::new(2, 1.0, FamilyPrior::UniformBall { gamma }).unwrap();
            uniform_ball_pipeline(&fam, UniformBallRoute::KlNaive).unwrap().value
        };
        let ratio = at(100.0) / at(200.0);
        assert!((3.0..5.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn glm_limits() {
        let design = orthogonal_design(50, 2);
        let model = GlmModel::new(design.clone(), 1.0, 0.25, 1.0).unwrap();
        assert_abs_diff_eq!(model.lambda_max, 1.0, epsilon = 1e-12);
        let r = glm_bound(&model, 2.0).unwrap();
        assert!(r.value > 0.0);

        // the ratio to [d · min(a/(nK), τ²)]^{p/2} stays bounded in both limits
        let wide = glm_bound(&GlmModel::new(design.clone(), 1.0, 0.25, 1e6).unwrap(), 2.0).unwrap();
        let narrow = glm_bound(&GlmModel::new(design, 1.0, 0.25, 1e-4).unwrap(), 2.0).unwrap();
        for r in [&wide, &narrow] {
            let c = r.parameters["constant"];
            assert!(c > 1e-8 && c < 1.0, "{c}");
        }
        let wide_rate = (2.0f64 * 1.0 / (50.0 * 0.25)).powf(1.0);
        assert_abs_diff_eq!(wide.parameters["rate"], wide_rate, epsilon = 1e-12);
        assert_abs_diff_eq!(narrow.parameters["rate"], 2.0 * 1e-8, epsilon = 1e-20);
    }

    #[test]
    fn spiked_examples() {
        let r = spiked_bound(&SpikedCovarianceFamily { n: 200, d: 4 }, 2.0).unwrap();
        assert!(r.valid);
        assert!(r.value >= r.parameters["explicit_floor"]);
        assert_abs_diff_eq!(r.value, r.parameters["closed_form"], epsilon = 1e-10 * r.value);

        let edge = spiked_bound(&SpikedCovarianceFamily { n: 4, d: 8 }, 2.0).unwrap();
        let floor = 0.5 * (24.0 * std::f64::consts::E).powi(-2) * 0.5;
        assert_abs_diff_eq!(edge.parameters["explicit_floor"], floor, epsilon = 1e-15);
        assert!(edge.value >= floor);
        assert!(spiked_bound(&SpikedCovarianceFamily { n: 1, d: 4 }, 2.0).is_err());
    }

    #[test]
    fn spiked_scales_like_d_over_n() {
        for d in [2usize, 4, 8] {
            for k in [4 * d, 8 * d, 16 * d] {
                let a = spiked_bound(&SpikedCovarianceFamily { n: k, d }, 2.0).unwrap().value;
                let b = spiked_bound(&SpikedCovarianceFamily { n: 2 * k, d }, 2.0).unwrap().value;
                let ratio = b / a;
                assert!((0.4..=0.6).contains(&ratio), "d={d} n={k}: {ratio}");
            }
        }
    }

    #[test]
    fn bounded_density_gaussian_prior() {
        for (d, sigma, tau) in [(1usize, 1.0, 1.0), (3, 0.5, 2.0), (6, 1.0, 0.3)] {
            let df = d as f64;
            let w = (2.0 * PI * tau * tau).powf(-df / 2.0);
            let fam = GaussianLocationFamily::new(d, sigma, FamilyPrior::BoundedDensity { w, v: tau * tau }).unwrap();
            let r = bounded_density_gaussian_bound(&fam, None).unwrap();
            let oracle = gaussian_conjugate_bayes_risk(d, sigma, tau).unwrap().risk;
            assert!(r.value <= oracle, "{} > {oracle}", r.value);
            // closed form of the internal radius choice
            let s2 = sigma * sigma;
            let t = 4f64.powf(-2.0 / df) * (w * unit_ball_volume(d)).powf(-2.0 / df) * s2 * s2 / (s2 + tau * tau).powi(2);
            assert_abs_diff_eq!(r.value, t / 2.0, epsilon = 1e-9 * t);
        }
        let spiky = GaussianLocationFamily::new(2, 1.0, FamilyPrior::BoundedDensity { w: 1e12, v: 1.0 }).unwrap();
        assert!(bounded_density_gaussian_bound(&spiky, None).unwrap().value < 1e-10);
    }

    #[test]
    fn bounded_density_dual_norm_reduces_to_euclidean() {
        let d = 4;
        let fam = GaussianLocationFamily::new(d, 1.0, FamilyPrior::BoundedDensity { w: 0.01, v: 1.0 }).unwrap();
        let plain = bounded_density_gaussian_bound(&fam, None).unwrap().value;
        let same = bounded_density_gaussian_bound(&fam, Some((d as f64).sqrt())).unwrap().value;
        assert_abs_diff_eq!(plain, same, epsilon = 1e-12 * plain);
        // ℓ∞ loss: dual norm ℓ1 with E‖Z‖₁ = d √(2/π)
        let l1 = d as f64 * (2.0 / PI).sqrt();
        let linf = bounded_density_gaussian_bound(&fam, Some(l1)).unwrap();
        assert_abs_diff_eq!(linf.value, plain * d as f64 / (l1 * l1), epsilon = 1e-9 * plain);
    }

    #[test]
    fn fixtures() {
        let o = make_discrete(DiscreteKind::Orthogonal { n: 3 }, 0).unwrap();
        assert_eq!(o.row(1), &[0.0, 1.0, 0.0]);
        let b = make_discrete(DiscreteKind::Bsc { p: 0.1 }, 0).unwrap();
        assert_eq!(b.row(0), &[0.9, 0.1]);
        let kind = DiscreteKind::Random {
            n_params: 5,
            n_obs: 6,
            n_actions: 5,
            general_loss: false,
        };
        let a = make_discrete(kind, 7).unwrap();
        let c = make_discrete(kind, 7).unwrap();
        assert_eq!(a, c);
        assert_ne!(a, make_discrete(kind, 8).unwrap());
        assert!(make_discrete(DiscreteKind::Bsc { p: 1.5 }, 0).is_err());
    }
}
