//! f-divergences between discrete distributions and Gaussian families.
//!
//! A divergence is parameterized by a [`ConvexGenerator`], a convex `f` on
//! `(0, ∞)` with `f(1) = 0`, together with its boundary values `f(0)` and
//! `f'(∞) = lim f(x)/x`. The discrete divergence is
//!
//! ```text
//! D_f(P || Q) = Σ_{q(x) > 0} q(x) f(p(x)/q(x)) + f'(∞) · P{q = 0}
//! ```
//!
//! with the convention `0 · ∞ = 0`. Infinite values are returned as
//! `f64::INFINITY`; every consumer treats that value as "no information
//! about the bound" rather than as an error.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{BoundError, Result};

/// Tolerance used when validating that weights sum to one.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Closed-form family a generator belongs to. Downstream modules dispatch
/// closed-form shortcuts on this tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorKind {
    /// `f_α` power divergence; `α = 1` is KL, `α = 2` is χ², `α = 1/2` is
    /// half the squared Hellinger distance.
    Power(f64),
    /// `f(x) = |x - 1| / 2`.
    TotalVariation,
    /// `f(x) = min(1, s) - min(x, s)`.
    Tsybakov(f64),
    /// User-supplied generator; only generic numerical routes apply.
    Custom,
}

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A convex function `f` with `f(1) = 0` plus its limits at the boundary.
#[derive(Clone)]
pub struct ConvexGenerator {
    kind: GeneratorKind,
    label: String,
    eval: EvalFn,
    at_zero: f64,
    slope_at_infinity: f64,
    warnings: Vec<String>,
}

impl fmt::Debug for ConvexGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexGenerator")
            .field("label", &self.label)
            .field("kind", &self.kind)
            .field("at_zero", &self.at_zero)
            .field("slope_at_infinity", &self.slope_at_infinity)
            .finish()
    }
}

impl ConvexGenerator {
    /// Power generator `f_α`, for any real `α`.
    pub fn power(alpha: f64) -> Self {
        let (eval, at_zero, slope): (EvalFn, f64, f64) = if alpha == 1.0 {
            (
                Arc::new(|x: f64| if x == 0.0 { 0.0 } else { x * x.ln() }),
                0.0,
                f64::INFINITY,
            )
        } else if alpha == 0.0 {
            (Arc::new(|x: f64| -x.ln()), f64::INFINITY, 0.0)
        } else if alpha > 0.0 && alpha < 1.0 {
            (Arc::new(move |x: f64| 1.0 - x.powf(alpha)), 1.0, 0.0)
        } else if alpha > 1.0 {
            (Arc::new(move |x: f64| x.powf(alpha) - 1.0), -1.0, f64::INFINITY)
        } else {
            // alpha < 0: x^α blows up at zero and x^α / x vanishes at infinity.
            (Arc::new(move |x: f64| x.powf(alpha) - 1.0), f64::INFINITY, 0.0)
        };
        let label = if alpha == 1.0 {
            "kl".to_string()
        } else if alpha == 2.0 {
            "chi2".to_string()
        } else if alpha == 0.5 {
            "hellinger".to_string()
        } else {
            format!("power({alpha})")
        };
        Self {
            kind: GeneratorKind::Power(alpha),
            label,
            eval,
            at_zero,
            slope_at_infinity: slope,
            warnings: Vec::new(),
        }
    }

    /// `x log x`.
    pub fn kl() -> Self {
        Self::power(1.0)
    }

    /// `x² - 1`.
    pub fn chi2() -> Self {
        Self::power(2.0)
    }

    /// `1 - √x`, whose divergence is `H²/2`.
    pub fn hellinger() -> Self {
        Self::power(0.5)
    }

    /// `|x - 1| / 2`.
    pub fn tv() -> Self {
        Self {
            kind: GeneratorKind::TotalVariation,
            label: "tv".to_string(),
            eval: Arc::new(|x: f64| (x - 1.0).abs() / 2.0),
            at_zero: 0.5,
            slope_at_infinity: 0.5,
            warnings: Vec::new(),
        }
    }

    /// `min(1, s) - min(x, s)`, the generator behind the likelihood-ratio
    /// form of the multiple-testing bound.
    pub fn tsybakov(s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(BoundError::OutOfRange {
                name: "s",
                value: s,
                expected: "s > 0",
            });
        }
        let base = s.min(1.0);
        Ok(Self {
            kind: GeneratorKind::Tsybakov(s),
            label: format!("tsybakov({s})"),
            eval: Arc::new(move |x: f64| base - x.min(s)),
            at_zero: base,
            slope_at_infinity: 0.0,
            warnings: Vec::new(),
        })
    }

    /// Wraps a user-supplied function. `f(1)` must be exactly zero; convexity
    /// is spot-checked on a logarithmic grid and violations are recorded in
    /// [`ConvexGenerator::warnings`] rather than rejected.
    pub fn custom<F>(label: &str, f: F, at_zero: f64, slope_at_infinity: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let at_one = f(1.0);
        if at_one != 0.0 {
            return Err(BoundError::Precondition(format!(
                "generator '{label}' has f(1) = {at_one}, expected 0"
            )));
        }
        let mut g = Self {
            kind: GeneratorKind::Custom,
            label: label.to_string(),
            eval: Arc::new(f),
            at_zero,
            slope_at_infinity,
            warnings: Vec::new(),
        };
        g.warnings = g.invariant_violations();
        Ok(g)
    }

    /// Evaluates `f(x)` for `x ≥ 0`, returning `f(0)` at zero and
    /// `+∞`-aware values elsewhere.
    pub fn evaluate(&self, x: f64) -> f64 {
        if x == 0.0 {
            self.at_zero
        } else {
            (self.eval)(x)
        }
    }

    /// `f(1 + h)` for `h ≥ -1`, accurate near `h = 0` for the power family.
    pub fn evaluate_shifted(&self, h: f64) -> f64 {
        if h <= -1.0 {
            return self.at_zero;
        }
        match self.kind {
            GeneratorKind::Power(a) if a == 1.0 => (1.0 + h) * h.ln_1p(),
            GeneratorKind::Power(a) if a == 0.0 => -h.ln_1p(),
            GeneratorKind::Power(a) if a > 0.0 && a < 1.0 => -(a * h.ln_1p()).exp_m1(),
            GeneratorKind::Power(a) => (a * h.ln_1p()).exp_m1(),
            _ => self.evaluate(1.0 + h),
        }
    }

    pub fn at_zero(&self) -> f64 {
        self.at_zero
    }

    pub fn slope_at_infinity(&self) -> f64 {
        self.slope_at_infinity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn is_kl(&self) -> bool {
        self.kind == GeneratorKind::Power(1.0)
    }

    pub fn is_chi2(&self) -> bool {
        self.kind == GeneratorKind::Power(2.0)
    }

    pub fn is_hellinger(&self) -> bool {
        self.kind == GeneratorKind::Power(0.5)
    }

    pub fn is_tv(&self) -> bool {
        self.kind == GeneratorKind::TotalVariation
    }

    /// Checks `f(1) = 0`, midpoint convexity on `{2^k : k = -20..20}` and
    /// consistency of `f(0)` with the grid limit. Returns one message per
    /// violation found; an empty vector means the checks passed.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let at_one = (self.eval)(1.0);
        if at_one != 0.0 {
            out.push(format!("f(1) = {at_one}"));
        }
        let grid: Vec<f64> = (-20..=20).map(|k| 2f64.powi(k)).collect();
        for (i, &x) in grid.iter().enumerate() {
            for &y in grid.iter().skip(i + 1).take(3) {
                let fx = (self.eval)(x);
                let fy = (self.eval)(y);
                let mid = (self.eval)((x + y) / 2.0);
                let scale = 1.0f64.max(fx.abs()).max(fy.abs());
                if mid > (fx + fy) / 2.0 + 1e-12 * scale {
                    out.push(format!("midpoint convexity fails between {x} and {y}"));
                }
            }
        }
        let near_zero = (self.eval)(grid[0]);
        if self.at_zero.is_finite() && self.at_zero < near_zero - 1e-9 {
            // Below the grid limit is inconsistent, since f decreases toward
            // f(0) only if f is non-increasing near zero and f(0) is its limit.
            let small = (self.eval)(1e-12);
            if self.at_zero < small - 1e-6 {
                out.push(format!(
                    "f(0) = {} is below the limit estimate {}",
                    self.at_zero, small
                ));
            }
        }
        out
    }
}

/// Probability weights over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    weights: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(BoundError::InvalidDistribution("empty alphabet".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w >= 0.0) || !w.is_finite())
        {
            return Err(BoundError::InvalidDistribution(format!(
                "weight[{i}] = {w} is not a nonnegative finite number"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(BoundError::InvalidDistribution(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { weights })
    }

    /// Normalizes nonnegative masses to sum to one.
    pub fn from_masses(masses: &[f64]) -> Result<Self> {
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(BoundError::InvalidDistribution(format!(
                "masses sum to {total}"
            )));
        }
        Self::new(masses.iter().map(|m| m / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(BoundError::InvalidDistribution("empty alphabet".into()));
        }
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Image measure under a deterministic map `x ↦ map[x]` onto
    /// `{0, .., out_len - 1}`.
    pub fn push_forward(&self, map: &[usize], out_len: usize) -> Result<Self> {
        if map.len() != self.len() {
            return Err(BoundError::AlphabetMismatch {
                left: map.len(),
                right: self.len(),
            });
        }
        let mut out = vec![0.0; out_len];
        for (&target, &w) in map.iter().zip(&self.weights) {
            if target >= out_len {
                return Err(BoundError::InvalidDistribution(format!(
                    "map target {target} outside alphabet of size {out_len}"
                )));
            }
            out[target] += w;
        }
        Ok(Self { weights: out })
    }
}

/// `c · v` with `0 · ∞ = 0`.
pub(crate) fn scale_ext(c: f64, v: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * v
    }
}

fn check_same_alphabet(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(BoundError::AlphabetMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

/// Discrete f-divergence between `p` and `q`.
pub fn f_divergence_discrete(
    f: &ConvexGenerator,
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<f64> {
    check_same_alphabet(p, q)?;
    Ok(f_divergence_slices(f, p.weights(), q.weights()))
}

pub(crate) fn f_divergence_slices(f: &ConvexGenerator, p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut singular = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if qi > 0.0 {
            if pi == 0.0 {
                total += scale_ext(qi, f.at_zero());
            } else {
                total += qi * f.evaluate(pi / qi);
            }
        } else {
            singular += pi;
        }
    }
    total + scale_ext(singular, f.slope_at_infinity())
}

/// Squared Hellinger distance `Σ (√p - √q)²`, in `[0, 2]`.
pub fn hellinger_sq_discrete(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    check_same_alphabet(p, q)?;
    Ok(p.weights()
        .iter()
        .zip(q.weights())
        .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
        .sum())
}

/// Total variation distance `½ Σ |p - q|`.
pub fn total_variation(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    check_same_alphabet(p, q)?;
    Ok(0.5
        * p.weights()
            .iter()
            .zip(q.weights())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// Covariance of a [`GaussianMeasure`].
#[derive(Debug, Clone, PartialEq)]
pub enum Covariance {
    /// `σ² I` with the given `σ`.
    Spherical(f64),
    Full(DMatrix<f64>),
}

/// Multivariate normal `N(mean, covariance)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeasure {
    mean: DVector<f64>,
    covariance: Covariance,
}

impl GaussianMeasure {
    pub fn spherical(mean: Vec<f64>, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(BoundError::NotPositiveDefinite);
        }
        Ok(Self {
            mean: DVector::from_vec(mean),
            covariance: Covariance::Spherical(sigma),
        })
    }

    pub fn full(mean: Vec<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(BoundError::DimensionMismatch {
                left: d,
                right: covariance.nrows(),
            });
        }
        check_spd(&covariance)?;
        Ok(Self {
            mean: DVector::from_vec(mean),
            covariance: Covariance::Full(covariance),
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &Covariance {
        &self.covariance
    }

    pub fn covariance_matrix(&self) -> DMatrix<f64> {
        match &self.covariance {
            Covariance::Spherical(s) => DMatrix::identity(self.dim(), self.dim()) * (s * s),
            Covariance::Full(m) => m.clone(),
        }
    }
}

pub(crate) fn check_spd(m: &DMatrix<f64>) -> Result<()> {
    let asym = (m - m.transpose()).abs().max();
    if asym > 1e-10 {
        return Err(BoundError::Precondition(format!(
            "covariance asymmetric by {asym}"
        )));
    }
    if min_eigenvalue(m) <= 0.0 {
        return Err(BoundError::NotPositiveDefinite);
    }
    Ok(())
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `D(a || b)` for multivariate normals.
pub fn gaussian_kl(a: &GaussianMeasure, b: &GaussianMeasure) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(BoundError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let d = a.dim() as f64;
    let diff = b.mean() - a.mean();
    if let (Covariance::Spherical(sa), Covariance::Spherical(sb)) = (a.covariance(), b.covariance())
    {
        let (va, vb) = (sa * sa, sb * sb);
        return Ok(0.5 * (d * va / vb + diff.norm_squared() / vb - d + d * (vb / va).ln()));
    }
    let sa = a.covariance_matrix();
    let sb = b.covariance_matrix();
    let chol_b = sb.clone().cholesky().ok_or(BoundError::NotPositiveDefinite)?;
    let chol_a = sa.clone().cholesky().ok_or(BoundError::NotPositiveDefinite)?;
    let trace = chol_b.solve(&sa).trace();
    let maha = diff.dot(&chol_b.solve(&diff));
    let logdet = |l: &DMatrix<f64>| 2.0 * l.diagonal().iter().map(|x| x.ln()).sum::<f64>();
    let log_ratio = logdet(&chol_b.l()) - logdet(&chol_a.l());
    Ok((0.5 * (trace + maha - d + log_ratio)).max(0.0))
}

/// `χ²(N(θ1, σ²I) || N(θ2, σ²I)) = exp(‖θ1 - θ2‖² / σ²) - 1`.
pub fn gaussian_chi2_location(theta1: &[f64], theta2: &[f64], sigma: f64) -> Result<f64> {
    if theta1.len() != theta2.len() {
        return Err(BoundError::DimensionMismatch {
            left: theta1.len(),
            right: theta2.len(),
        });
    }
    if !(sigma > 0.0) {
        return Err(BoundError::OutOfRange {
            name: "sigma",
            value: sigma,
            expected: "sigma > 0",
        });
    }
    let sq: f64 = theta1
        .iter()
        .zip(theta2)
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    Ok((sq / (sigma * sigma)).exp_m1())
}

/// Upper bound `exp(‖Σ1 - Σ2‖²_F / λ_min(Σ2)²) - 1` on
/// `χ²(N(0, Σ1) || N(0, Σ2))`, valid when `2Σ1⁻¹ - Σ2⁻¹` is positive
/// definite and `‖Σ1 - Σ2‖²_F ≤ λ_min(Σ2)² / 2`.
pub fn gaussian_chi2_covariance(sigma1: &DMatrix<f64>, sigma2: &DMatrix<f64>) -> Result<f64> {
    if sigma1.shape() != sigma2.shape() || sigma1.nrows() != sigma1.ncols() {
        return Err(BoundError::DimensionMismatch {
            left: sigma1.nrows(),
            right: sigma2.nrows(),
        });
    }
    check_spd(sigma1)?;
    check_spd(sigma2)?;
    let inv1 = sigma1
        .clone()
        .try_inverse()
        .ok_or(BoundError::NotPositiveDefinite)?;
    let inv2 = sigma2
        .clone()
        .try_inverse()
        .ok_or(BoundError::NotPositiveDefinite)?;
    let gap = inv1 * 2.0 - inv2;
    let gap = (&gap + gap.transpose()) * 0.5;
    if min_eigenvalue(&gap) <= 0.0 {
        return Err(BoundError::Precondition(
            "2Σ1⁻¹ - Σ2⁻¹ is not positive definite".into(),
        ));
    }
    let frob_sq = (sigma1 - sigma2).norm_squared();
    let lmin = min_eigenvalue(sigma2);
    if frob_sq > 0.5 * lmin * lmin {
        return Err(BoundError::Precondition(format!(
            "‖Σ1 - Σ2‖²_F = {frob_sq} exceeds λ_min(Σ2)²/2 = {}",
            0.5 * lmin * lmin
        )));
    }
    Ok((frob_sq / (lmin * lmin)).exp_m1())
}
