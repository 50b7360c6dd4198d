//! f-informativities `I_f(w, P) = inf_Q Σ_θ w(θ) D_f(P_θ || Q)` and upper
//! bounds on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::divergence::{f_divergence_slices, ConvexGenerator, DiscreteDistribution, SIMPLEX_TOL};
use crate::error::{BoundError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    UpperBound,
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exactness::Exact => "exact",
            Exactness::UpperBound => "upper_bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InformativityEstimate {
    pub value: f64,
    pub exactness: Exactness,
    pub method: String,
    pub epsilon_used: Option<f64>,
}

impl InformativityEstimate {
    pub fn exact(value: f64, method: &str) -> Self {
        Self {
            value: value.max(0.0),
            exactness: Exactness::Exact,
            method: method.to_string(),
            epsilon_used: None,
        }
    }

    pub fn upper(value: f64, method: &str) -> Self {
        Self {
            value: value.max(0.0),
            exactness: Exactness::UpperBound,
            method: method.to_string(),
            epsilon_used: None,
        }
    }
}

/// A finite decision problem: parameters `θ`, observations `x`, actions `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteProblem {
    channel: Vec<DiscreteDistribution>,
    prior: DiscreteDistribution,
    loss: Vec<Vec<f64>>,
    pub theta_labels: Vec<String>,
    pub x_labels: Vec<String>,
    pub action_labels: Vec<String>,
}

fn row_error(name: &str, i: usize, detail: String) -> BoundError {
    BoundError::InvalidProblem(format!("{name}[{i}] {detail}"))
}

impl DiscreteProblem {
    /// `channel[θ][x] = P_θ(x)`, `loss[θ][a] = L(θ, a)`.
    pub fn new(channel: Vec<Vec<f64>>, prior: Vec<f64>, loss: Vec<Vec<f64>>) -> Result<Self> {
        let n = channel.len();
        if n == 0 {
            return Err(BoundError::InvalidProblem("channel has no rows".into()));
        }
        if prior.len() != n {
            return Err(BoundError::InvalidProblem(format!(
                "prior has {} entries but channel has {n} rows",
                prior.len()
            )));
        }
        if loss.len() != n {
            return Err(BoundError::InvalidProblem(format!(
                "loss has {} rows but channel has {n} rows",
                loss.len()
            )));
        }
        let m = channel[0].len();
        let mut rows = Vec::with_capacity(n);
        for (i, row) in channel.into_iter().enumerate() {
            if row.len() != m {
                return Err(row_error("channel", i, format!("has {} entries, expected {m}", row.len())));
            }
            if let Some(v) = row.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
                return Err(row_error("channel", i, format!("has invalid entry {v}")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > SIMPLEX_TOL {
                return Err(row_error("channel", i, format!("sums to {total}")));
            }
            rows.push(DiscreteDistribution::new(row)?);
        }
        for (i, w) in prior.iter().enumerate() {
            if !(*w >= 0.0) || !w.is_finite() {
                return Err(row_error("prior", i, format!("= {w} is negative or not finite")));
            }
        }
        let total: f64 = prior.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(BoundError::InvalidProblem(format!("prior sums to {total}")));
        }
        let a = loss[0].len();
        if a == 0 {
            return Err(BoundError::InvalidProblem("loss has no actions".into()));
        }
        for (i, row) in loss.iter().enumerate() {
            if row.len() != a {
                return Err(row_error("loss", i, format!("has {} entries, expected {a}", row.len())));
            }
            if let Some(v) = row.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
                return Err(row_error("loss", i, format!("has invalid entry {v}")));
            }
        }
        Ok(Self {
            theta_labels: (0..n).map(|i| format!("theta{i}")).collect(),
            x_labels: (0..m).map(|i| format!("x{i}")).collect(),
            action_labels: (0..a).map(|i| format!("a{i}")).collect(),
            channel: rows,
            prior: DiscreteDistribution::new(prior)?,
            loss,
        })
    }

    /// Multiple-testing problem: actions are the parameters themselves and the
    /// loss is `1{θ ≠ a}`.
    pub fn zero_one(channel: Vec<Vec<f64>>, prior: Vec<f64>) -> Result<Self> {
        let n = channel.len();
        let loss = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(channel, prior, loss)
    }

    pub fn n_params(&self) -> usize {
        self.channel.len()
    }

    pub fn n_obs(&self) -> usize {
        self.channel[0].len()
    }

    pub fn n_actions(&self) -> usize {
        self.loss[0].len()
    }

    pub fn channel(&self) -> &[DiscreteDistribution] {
        &self.channel
    }

    pub fn row(&self, theta: usize) -> &[f64] {
        self.channel[theta].weights()
    }

    pub fn prior(&self) -> &DiscreteDistribution {
        &self.prior
    }

    pub fn loss(&self) -> &[Vec<f64>] {
        &self.loss
    }

    pub fn is_zero_one(&self) -> bool {
        self.loss.iter().flatten().all(|&l| l == 0.0 || l == 1.0)
    }

    /// Loss is `1[θ ≠ a]` with one action per parameter.
    pub fn is_identification(&self) -> bool {
        self.n_actions() == self.n_params()
            && self
                .loss
                .iter()
                .enumerate()
                .all(|(t, row)| row.iter().enumerate().all(|(a, &l)| l == if t == a { 0.0 } else { 1.0 }))
    }

    /// `Σ_θ w(θ) P_θ`.
    pub fn marginal(&self) -> DiscreteDistribution {
        let mut m = vec![0.0; self.n_obs()];
        for (row, &w) in self.channel.iter().zip(self.prior.weights()) {
            for (acc, p) in m.iter_mut().zip(row.weights()) {
                *acc += w * p;
            }
        }
        let total: f64 = m.iter().sum();
        DiscreteDistribution::new(m.into_iter().map(|v| v / total).collect())
            .expect("mixture of distributions is a distribution")
    }

    /// Same channel and loss under a different prior.
    pub fn with_prior(&self, prior: Vec<f64>) -> Result<Self> {
        if prior.len() != self.n_params() {
            return Err(BoundError::AlphabetMismatch {
                left: prior.len(),
                right: self.n_params(),
            });
        }
        let mut out = self.clone();
        out.prior = DiscreteDistribution::new(prior)
            .map_err(|e| BoundError::InvalidProblem(format!("prior: {e}")))?;
        Ok(out)
    }

    /// `D_f(P_i || P_j)` for all pairs.
    pub fn pairwise_divergences(&self, f: &ConvexGenerator) -> Vec<Vec<f64>> {
        self.channel
            .iter()
            .map(|p| {
                self.channel
                    .iter()
                    .map(|q| f_divergence_slices(f, p.weights(), q.weights()))
                    .collect()
            })
            .collect()
    }

    /// Prior-weighted average of pairwise squared Hellinger distances.
    pub fn hellinger_pair_average(&self) -> f64 {
        let w = self.prior.weights();
        let mut total = 0.0;
        for (i, p) in self.channel.iter().enumerate() {
            for (j, q) in self.channel.iter().enumerate() {
                let h2: f64 = p
                    .weights()
                    .iter()
                    .zip(q.weights())
                    .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
                    .sum();
                total += w[i] * w[j] * h2;
            }
        }
        total
    }
}

/// `Σ_θ w(θ) D_f(P_θ || q)`, an upper bound on `I_f` for any `q`.
pub fn informativity_via_center(
    f: &ConvexGenerator,
    problem: &DiscreteProblem,
    q: &DiscreteDistribution,
) -> Result<InformativityEstimate> {
    if q.len() != problem.n_obs() {
        return Err(BoundError::AlphabetMismatch {
            left: problem.n_obs(),
            right: q.len(),
        });
    }
    let value = weighted_sum(problem, |row| f_divergence_slices(f, row, q.weights()));
    Ok(InformativityEstimate::upper(value, &format!("center_{}", f.label())))
}

fn weighted_sum(problem: &DiscreteProblem, mut term: impl FnMut(&[f64]) -> f64) -> f64 {
    problem
        .channel()
        .iter()
        .zip(problem.prior().weights())
        .filter(|(_, &w)| w > 0.0)
        .map(|(row, &w)| w * term(row.weights()))
        .sum()
}

/// Mutual information `I(w, P)`, attained at the marginal.
pub fn mutual_information_exact(problem: &DiscreteProblem) -> InformativityEstimate {
    let marginal = problem.marginal();
    let kl = ConvexGenerator::kl();
    let value = weighted_sum(problem, |row| f_divergence_slices(&kl, row, marginal.weights()));
    InformativityEstimate::exact(value, "mutual_information")
}

/// χ²-informativity via the minimizer `q ∝ √(Σ_θ w(θ) p_θ²)`; its value is
/// `(Σ_x √(Σ_θ w p_θ(x)²))² - 1`.
pub fn chi2_informativity_exact(problem: &DiscreteProblem) -> InformativityEstimate {
    let w = problem.prior().weights();
    let s: f64 = (0..problem.n_obs())
        .map(|x| {
            (0..problem.n_params())
                .map(|t| w[t] * problem.row(t)[x].powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .sum();
    InformativityEstimate::exact(s * s - 1.0, "chi2_exact")
}

/// Center attaining [`chi2_informativity_exact`].
pub fn chi2_optimal_center(problem: &DiscreteProblem) -> DiscreteDistribution {
    let w = problem.prior().weights();
    let s: Vec<f64> = (0..problem.n_obs())
        .map(|x| {
            (0..problem.n_params())
                .map(|t| w[t] * problem.row(t)[x].powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    DiscreteDistribution::from_masses(&s).expect("channel has positive mass")
}

/// Informativity for `f_{1/2}`: `1 - ‖u‖₂` with `u = Σ_θ w(θ) √p_θ`.
pub fn hellinger_informativity_exact(problem: &DiscreteProblem) -> InformativityEstimate {
    let w = problem.prior().weights();
    let norm_sq: f64 = (0..problem.n_obs())
        .map(|x| {
            (0..problem.n_params())
                .map(|t| w[t] * problem.row(t)[x].sqrt())
                .sum::<f64>()
                .powi(2)
        })
        .sum();
    InformativityEstimate::exact(1.0 - norm_sq.sqrt(), "hellinger_exact")
}

fn check_weights(name: &str, w: &[f64]) -> Result<()> {
    DiscreteDistribution::new(w.to_vec())
        .map(|_| ())
        .map_err(|e| BoundError::InvalidProblem(format!("{name}: {e}")))
}

fn check_matrix(m: &[Vec<f64>], rows: usize, cols: usize) -> Result<()> {
    if m.len() != rows {
        return Err(BoundError::DimensionMismatch {
            left: m.len(),
            right: rows,
        });
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(BoundError::DimensionMismatch {
                left: row.len(),
                right: cols,
            });
        }
        if let Some(v) = row.iter().find(|v| !(**v >= 0.0)) {
            return Err(row_error("divergence", i, format!("has invalid entry {v}")));
        }
    }
    Ok(())
}

/// `-Σ_θ w(θ) log Σ_j ν(j) exp(-kl[θ][j])`.
pub fn haussler_opper_bound(
    kl_matrix: &[Vec<f64>],
    prior: &[f64],
    nu: &[f64],
) -> Result<InformativityEstimate> {
    check_weights("prior", prior)?;
    check_weights("nu", nu)?;
    check_matrix(kl_matrix, prior.len(), nu.len())?;
    let mut value = 0.0;
    for (row, &w) in kl_matrix.iter().zip(prior) {
        if w == 0.0 {
            continue;
        }
        // log-sum-exp over the finite entries with positive weight
        let terms: Vec<f64> = row
            .iter()
            .zip(nu)
            .filter(|(k, &v)| v > 0.0 && k.is_finite())
            .map(|(k, &v)| v.ln() - k)
            .collect();
        if terms.is_empty() {
            return Ok(InformativityEstimate::upper(f64::INFINITY, "haussler_opper"));
        }
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
        value -= w * lse;
    }
    Ok(InformativityEstimate::upper(value, "haussler_opper"))
}

fn check_grid(epsilons: &[f64]) -> Result<()> {
    if epsilons.is_empty() {
        return Err(BoundError::InvalidProblem("empty epsilon grid".into()));
    }
    if let Some(e) = epsilons.iter().find(|e| !(**e > 0.0)) {
        return Err(BoundError::OutOfRange {
            name: "epsilon",
            value: *e,
            expected: "epsilon > 0",
        });
    }
    Ok(())
}

/// `min_ε log M_KL(ε) + ε²` over the supplied grid.
pub fn yang_barron_bound<F>(covering_oracle: F, epsilons: &[f64]) -> Result<InformativityEstimate>
where
    F: Fn(f64) -> f64,
{
    check_grid(epsilons)?;
    let mut best = InformativityEstimate::upper(f64::INFINITY, "yang_barron");
    for &eps in epsilons {
        let count = covering_oracle(eps);
        let v = count.max(1.0).ln() + eps * eps;
        if v < best.value {
            best.value = v;
            best.epsilon_used = Some(eps);
        }
    }
    Ok(best)
}

/// `Σ_θ w(θ) [Σ_j ν(j) (div[θ][j] + 1)^{1/(1-α)}]^{1-α} - 1` for `α ∉ [0, 1]`.
pub fn power_mixture_bound(
    alpha: f64,
    div_matrix: &[Vec<f64>],
    prior: &[f64],
    nu: &[f64],
) -> Result<InformativityEstimate> {
    if (0.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(BoundError::OutOfRange {
            name: "alpha",
            value: alpha,
            expected: "alpha outside [0, 1]",
        });
    }
    check_weights("prior", prior)?;
    check_weights("nu", nu)?;
    check_matrix(div_matrix, prior.len(), nu.len())?;
    let inner_exp = 1.0 / (1.0 - alpha);
    let mut total = 0.0;
    for (row, &w) in div_matrix.iter().zip(prior) {
        if w == 0.0 {
            continue;
        }
        let inner: f64 = row
            .iter()
            .zip(nu)
            .filter(|(_, &v)| v > 0.0)
            .map(|(d, &v)| v * (d + 1.0).powf(inner_exp))
            .sum();
        total += w * inner.powf(1.0 - alpha);
    }
    Ok(InformativityEstimate::upper(total - 1.0, &format!("power_mixture({alpha})")))
}

/// `min_ε (1 + ε²) M_α(ε)^{α-1} - 1` over the supplied grid, `α > 1`.
pub fn power_covering_bound<F>(
    alpha: f64,
    covering_oracle: F,
    epsilons: &[f64],
) -> Result<InformativityEstimate>
where
    F: Fn(f64) -> f64,
{
    if !(alpha > 1.0) {
        return Err(BoundError::OutOfRange {
            name: "alpha",
            value: alpha,
            expected: "alpha > 1",
        });
    }
    check_grid(epsilons)?;
    let mut best = InformativityEstimate::upper(f64::INFINITY, &format!("power_covering({alpha})"));
    for &eps in epsilons {
        let count = covering_oracle(eps).max(1.0);
        let v = (1.0 + eps * eps) * count.powf(alpha - 1.0) - 1.0;
        if v < best.value {
            best.value = v;
            best.epsilon_used = Some(eps);
        }
    }
    best.value = best.value.max(0.0);
    Ok(best)
}

/// 40 log-spaced points on `[1e-3, 1e3]`.
pub fn default_epsilon_grid() -> Vec<f64> {
    let n = 40;
    (0..n)
        .map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / (n - 1) as f64))
        .collect()
}
