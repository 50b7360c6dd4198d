//! Lower bounds on Bayes and minimax risks.
//!
//! Zero-one losses go through `φ_f(R, R0) ≤ I`; general losses through the
//! small-ball mass `sup_a w{θ : L(θ, a) < t}` and the threshold `1 - u_f(I)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::divergence::{ConvexGenerator, DiscreteDistribution, GeneratorKind};
use crate::error::{check_range, BoundError, Result};
use crate::informativity::{DiscreteProblem, InformativityEstimate};
use crate::phi::{invert_phi, phi_unchecked, u_f_c, u_f_complement};

type MassFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `t ↦ sup_a w(B_t(a))` with `B_t(a) = {θ : L(θ, a) < t}`.
#[derive(Clone)]
pub enum SmallBallProfile {
    /// Finite loss matrix: `levels[k]` is the k-th distinct loss value and
    /// `mass_after[k] = max_a w{θ : L(θ, a) ≤ levels[k]}`.
    Step { levels: Vec<f64>, mass_after: Vec<f64> },
    /// Closed-form mass, assumed non-decreasing; `support_hint` is a radius
    /// beyond which the mass is 1.
    Function { mass: MassFn, support_hint: Option<f64> },
    /// Mass evaluated on a grid of radii, typically by Monte Carlo. Between
    /// grid points the next grid value is used, which over-states the mass.
    Tabulated { radii: Vec<f64>, mass: Vec<f64> },
}

impl fmt::Debug for SmallBallProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmallBallProfile::Step { levels, mass_after } => f
                .debug_struct("Step")
                .field("levels", levels)
                .field("mass_after", mass_after)
                .finish(),
            SmallBallProfile::Function { support_hint, .. } => f
                .debug_struct("Function")
                .field("support_hint", support_hint)
                .finish_non_exhaustive(),
            SmallBallProfile::Tabulated { radii, mass } => f
                .debug_struct("Tabulated")
                .field("radii", radii)
                .field("mass", mass)
                .finish(),
        }
    }
}

impl SmallBallProfile {
    pub fn from_problem(problem: &DiscreteProblem) -> Self {
        let w = problem.prior().weights();
        let loss = problem.loss();
        let mut levels: Vec<f64> = loss.iter().flatten().copied().collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let mass_after = levels
            .iter()
            .map(|&lvl| {
                (0..problem.n_actions())
                    .map(|a| {
                        (0..problem.n_params())
                            .filter(|&t| loss[t][a] <= lvl)
                            .map(|t| w[t])
                            .sum::<f64>()
                    })
                    .fold(0.0, f64::max)
                    .min(1.0)
            })
            .collect();
        SmallBallProfile::Step { levels, mass_after }
    }

    pub fn from_fn<F>(mass: F, support_hint: Option<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        SmallBallProfile::Function {
            mass: Arc::new(mass),
            support_hint,
        }
    }

    /// Enforces monotonicity with a running max and clips to `[0, 1]`.
    pub fn tabulated(radii: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        if radii.is_empty() || radii.len() != mass.len() {
            return Err(BoundError::InvalidProblem(
                "tabulated profile needs matching, non-empty radii and masses".into(),
            ));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) || !(radii[0] > 0.0) {
            return Err(BoundError::InvalidProblem(
                "tabulated radii must be positive and increasing".into(),
            ));
        }
        let mut running = 0.0f64;
        let mass = mass
            .into_iter()
            .map(|m| {
                running = running.max(m.clamp(0.0, 1.0));
                running
            })
            .collect();
        Ok(SmallBallProfile::Tabulated { radii, mass })
    }

    pub fn mass_at(&self, t: f64) -> f64 {
        match self {
            SmallBallProfile::Step { levels, mass_after } => levels
                .iter()
                .zip(mass_after)
                .take_while(|(l, _)| **l < t)
                .last()
                .map_or(0.0, |(_, m)| *m),
            SmallBallProfile::Function { mass, support_hint } => match support_hint {
                Some(h) if t > *h => 1.0,
                _ => mass(t).clamp(0.0, 1.0),
            },
            SmallBallProfile::Tabulated { radii, mass } => radii
                .iter()
                .position(|r| *r >= t)
                .map_or(1.0, |k| mass[k]),
        }
    }

    /// `sup_a w(B(a))` for the zero-loss ball `B(a) = {θ : L(θ, a) = 0}`.
    pub fn zero_ball_mass(&self) -> f64 {
        match self {
            SmallBallProfile::Step { levels, mass_after } => {
                if levels.first() == Some(&0.0) {
                    mass_after[0]
                } else {
                    0.0
                }
            }
            _ => self.mass_at(f64::MIN_POSITIVE),
        }
    }

    /// `sup{t > 0 : mass_at(t) < threshold}`, rounded down to a point that is
    /// certainly in the set. Returns 0 when the set is empty.
    pub fn sup_radius_below(&self, threshold: f64) -> f64 {
        if !(threshold > 0.0) {
            return 0.0;
        }
        match self {
            SmallBallProfile::Step { levels, mass_after } => {
                match levels.iter().zip(mass_after).find(|(_, m)| **m >= threshold) {
                    Some((l, _)) => *l,
                    None => f64::INFINITY,
                }
            }
            SmallBallProfile::Tabulated { radii, mass } => radii
                .iter()
                .zip(mass)
                .take_while(|(_, m)| **m < threshold)
                .last()
                .map_or(0.0, |(r, _)| *r),
            SmallBallProfile::Function { .. } => {
                let below = |t: f64| self.mass_at(t) < threshold;
                let mut lo = 1.0;
                let mut hi = 1.0;
                if below(1.0) {
                    while below(hi) {
                        hi *= 2.0;
                        if hi > 1e300 {
                            return f64::INFINITY;
                        }
                    }
                    lo = hi / 2.0;
                } else {
                    while !below(lo) {
                        lo /= 2.0;
                        if lo < 1e-300 {
                            return 0.0;
                        }
                    }
                    hi = lo * 2.0;
                }
                for _ in 0..200 {
                    if hi - lo <= 1e-13 * lo {
                        break;
                    }
                    let mid = (lo * hi).sqrt();
                    if below(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub value: f64,
    pub f_label: Option<String>,
    pub informativity_input: Option<InformativityEstimate>,
    pub parameters: BTreeMap<String, f64>,
    pub valid: bool,
    pub reason: Option<String>,
}

impl BoundReport {
    pub fn new(name: &str, value: f64) -> Self {
        Self {
            bound_name: name.to_string(),
            value: if value.is_nan() { 0.0 } else { value.max(0.0) },
            f_label: None,
            informativity_input: None,
            parameters: BTreeMap::new(),
            valid: true,
            reason: None,
        }
    }

    pub fn invalid(name: &str, reason: String) -> Self {
        let mut r = Self::new(name, 0.0);
        r.valid = false;
        r.reason = Some(reason);
        r
    }

    pub fn with_f(mut self, f: &str) -> Self {
        self.f_label = Some(f.to_string());
        self
    }

    pub fn with_informativity(mut self, est: InformativityEstimate) -> Self {
        self.informativity_input = Some(est);
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }
}

/// Mass of the best zero-loss ball, `sup_a w{θ : L(θ, a) = 0}`.
pub fn sup_zero_ball(problem: &DiscreteProblem) -> f64 {
    let w = problem.prior().weights();
    (0..problem.n_actions())
        .map(|a| {
            (0..problem.n_params())
                .filter(|&t| problem.loss()[t][a] == 0.0)
                .map(|t| w[t])
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
        .min(1.0)
}

/// No-data Bayes risk `1 - sup_a w(B(a))` for zero-one losses.
pub fn r0(problem: &DiscreteProblem) -> Result<f64> {
    if !problem.is_zero_one() {
        return Err(BoundError::Precondition("loss is not zero-one valued".into()));
    }
    Ok(1.0 - sup_zero_ball(problem))
}

/// `1 + (I + log(1 + R0)) / log(sup_a w(B(a)))`, clamped to `[0, 1]`.
pub fn generalized_fano(i_up: f64, r0: f64, sup_zero_ball: f64) -> Result<f64> {
    if !(sup_zero_ball > 0.0 && sup_zero_ball < 1.0) {
        return Err(BoundError::OutOfRange {
            name: "sup_zero_ball",
            value: sup_zero_ball,
            expected: "sup_zero_ball in (0, 1)",
        });
    }
    check_range("r0", r0, 0.0, 1.0, "r0 in [0, 1]")?;
    if i_up.is_nan() {
        return Err(BoundError::OutOfRange {
            name: "i_up",
            value: i_up,
            expected: "i_up >= 0",
        });
    }
    let v = 1.0 + (i_up + r0.ln_1p()) / sup_zero_ball.ln();
    Ok(if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) })
}

/// `1 - (I + log 2) / log N`, clamped to `[0, 1]`.
pub fn classical_fano(i_up: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(BoundError::OutOfRange {
            name: "n",
            value: n as f64,
            expected: "n >= 2",
        });
    }
    let v = 1.0 - (i_up + std::f64::consts::LN_2) / (n as f64).ln();
    Ok(v.clamp(0.0, 1.0))
}

/// Which closed form of the zero-one bound to use.
#[derive(Debug, Clone)]
pub enum ZeroOneKind {
    /// `R0 - √(R0 (1 - R0) I_χ²)`.
    Chi2,
    /// `R0 - I_TV`.
    Tv,
    /// Input is the prior-pair average `h²` of squared Hellinger distances.
    Hellinger,
    /// Numerical inversion of `φ_f(R, R0) ≤ I`.
    Generic(ConvexGenerator),
}

/// Zero-one loss bound, clamped to `[0, r0]`.
pub fn zero_one_bound(kind: &ZeroOneKind, input: f64, r0: f64) -> Result<BoundReport> {
    check_range("r0", r0, 0.0, 1.0, "r0 in [0, 1]")?;
    if input.is_nan() || input < 0.0 {
        return Err(BoundError::OutOfRange {
            name: "informativity",
            value: input,
            expected: "informativity >= 0",
        });
    }
    let report = match kind {
        ZeroOneKind::Chi2 => {
            let v = r0 - (r0 * (1.0 - r0) * input).sqrt();
            BoundReport::new("chi2_zero_one", v.clamp(0.0, r0)).with_f("chi2")
        }
        ZeroOneKind::Tv => BoundReport::new("tv_zero_one", (r0 - input).clamp(0.0, r0)).with_f("tv"),
        ZeroOneKind::Hellinger => {
            let h2 = input;
            if h2 > 2.0 * r0 {
                BoundReport::invalid(
                    "hellinger_zero_one",
                    format!("h2 = {h2} exceeds 2 r0 = {}", 2.0 * r0),
                )
                .with_f("hellinger")
            } else {
                let v = r0 - (2.0 * r0 - 1.0) * h2 / 2.0
                    - (r0 * (1.0 - r0) * h2 * (2.0 - h2)).max(0.0).sqrt();
                BoundReport::new("hellinger_zero_one", v.clamp(0.0, r0)).with_f("hellinger")
            }
        }
        ZeroOneKind::Generic(f) => {
            if r0 == 0.0 {
                BoundReport::new("phi_inversion", 0.0).with_f(f.label())
            } else {
                let inv = invert_phi(f, input, r0)?;
                BoundReport::new("phi_inversion", inv.lower_bound)
                    .with_f(f.label())
                    .with_param("iterations", inv.iterations as f64)
            }
        }
    };
    Ok(report.with_param("r0", r0).with_param("input", input))
}

/// Threshold `1 - u_f(I)`, replaced by the closed-form relaxation
/// when `f` has one. Returns `None` for Hellinger beyond its plateau.
fn general_threshold(f: &ConvexGenerator, i_up: f64) -> Option<f64> {
    let via_u = u_f_complement(f, i_up);
    let closed = match f.kind() {
        GeneratorKind::Power(a) if a == 1.0 => Some(0.25 * (-2.0 * i_up).exp()),
        GeneratorKind::Power(a) if a == 2.0 => Some(1.0 / (4.0 * (1.0 + i_up))),
        GeneratorKind::TotalVariation => Some(0.5 - i_up),
        GeneratorKind::Power(a) if a == 0.5 => {
            if i_up >= 1.0 - std::f64::consts::FRAC_1_SQRT_2 {
                return None;
            }
            Some(0.5 - (1.0 - i_up) * (i_up * (2.0 - i_up)).sqrt())
        }
        _ => None,
    };
    match closed {
        Some(c) => {
            debug_assert!(c <= via_u * (1.0 + 1e-9) + 1e-12, "closed threshold {c} exceeds 1 - u_f = {via_u}");
            Some(c.min(via_u).max(0.0))
        }
        None => Some(via_u),
    }
}

/// `½ sup{t : sup_a w(B_t(a)) < 1 - u_f(I)}`.
pub fn general_bound(
    f: &ConvexGenerator,
    i_up: f64,
    profile: &SmallBallProfile,
) -> Result<BoundReport> {
    if i_up.is_nan() {
        return Err(BoundError::OutOfRange {
            name: "i_up",
            value: i_up,
            expected: "i_up >= 0",
        });
    }
    let i_up = i_up.max(0.0);
    let name = "general";
    if i_up == f64::INFINITY {
        return Ok(BoundReport::new(name, 0.0).with_f(f.label()).with_param("threshold", 0.0));
    }
    let Some(threshold) = general_threshold(f, i_up) else {
        return Ok(BoundReport::invalid(
            name,
            format!("informativity {i_up} is at least 1 - 1/sqrt(2)"),
        )
        .with_f(f.label()));
    };
    let radius = profile.sup_radius_below(threshold);
    if !radius.is_finite() {
        return Err(BoundError::InvalidProblem(
            "small-ball mass never reaches the threshold".into(),
        ));
    }
    Ok(BoundReport::new(name, 0.5 * radius)
        .with_f(f.label())
        .with_param("threshold", threshold)
        .with_param("radius", radius)
        .with_param("i_up", i_up))
}

/// `sup_c c · sup{t : sup_a w(B_t(a)) < 1 - u_{f,c}(I)}` over `c_grid ⊂ (0, 1]`.
pub fn sharpened_general_bound(
    f: &ConvexGenerator,
    i_up: f64,
    profile: &SmallBallProfile,
    c_grid: &[f64],
) -> Result<BoundReport> {
    if c_grid.is_empty() {
        return Err(BoundError::InvalidProblem("empty c grid".into()));
    }
    let mut best = BoundReport::new("general_sharpened", 0.0).with_f(f.label());
    if !(i_up < f64::INFINITY) {
        return Ok(best);
    }
    for &c in c_grid {
        let threshold = 1.0 - u_f_c(f, c, i_up.max(0.0))?;
        let radius = profile.sup_radius_below(threshold);
        if !radius.is_finite() {
            return Err(BoundError::InvalidProblem(
                "small-ball mass never reaches the threshold".into(),
            ));
        }
        let v = c * radius;
        if v > best.value {
            best = BoundReport::new("general_sharpened", v)
                .with_f(f.label())
                .with_param("c", c)
                .with_param("threshold", threshold)
                .with_param("radius", radius);
        }
    }
    Ok(best.with_param("i_up", i_up))
}

/// `c ∈ {0.01, 0.02, …, 1}`.
pub fn default_c_grid() -> Vec<f64> {
    (1..=100).map(|k| k as f64 / 100.0).collect()
}

/// `ψ_{N,f}(x) = φ_f(x, 1 - x/N)`.
pub fn birge_psi(f: &ConvexGenerator, n: usize, x: f64) -> f64 {
    phi_unchecked(f, x, 1.0 - x / n as f64)
}

/// Multiple-hypothesis minimax bound: the smallest `x ∈ [0, N/(N+1)]` with
/// `ψ_{N,f}(x) ≤ min_j (1/N) Σ_{i≠j} D_f(P_i || P_j)`.
pub fn birge_gushchin(f: &ConvexGenerator, pairwise: &[Vec<f64>]) -> Result<BoundReport> {
    let k = pairwise.len();
    if k < 2 {
        return Err(BoundError::InvalidProblem("need at least two hypotheses".into()));
    }
    if pairwise.iter().any(|r| r.len() != k) {
        return Err(BoundError::InvalidProblem("pairwise matrix is not square".into()));
    }
    for (i, row) in pairwise.iter().enumerate() {
        if row[i].abs() > 1e-12 {
            return Err(BoundError::InvalidProblem(format!(
                "pairwise[{i}][{i}] = {} is not zero",
                row[i]
            )));
        }
    }
    let n = k - 1;
    let nf = n as f64;
    let cap = nf / (nf + 1.0);
    let b = (0..k)
        .map(|j| (0..k).filter(|&i| i != j).map(|i| pairwise[i][j]).sum::<f64>() / nf)
        .fold(f64::INFINITY, f64::min);

    let grid = 2000;
    let mut prev = f64::INFINITY;
    for s in 0..=grid {
        let x = cap * s as f64 / grid as f64;
        let v = birge_psi(f, n, x);
        if v > prev + 1e-10 * (1.0 + prev.abs()) {
            return Err(BoundError::Monotonicity(format!(
                "psi for {} increases near x = {x}",
                f.label()
            )));
        }
        prev = v;
    }

    let report = |v: f64, iters: usize| {
        BoundReport::new("birge_gushchin", v)
            .with_f(f.label())
            .with_param("average_divergence", b)
            .with_param("n", nf)
            .with_param("iterations", iters as f64)
    };
    if b <= 0.0 {
        return Ok(report(cap, 0));
    }
    if birge_psi(f, n, 0.0) <= b {
        return Ok(report(0.0, 0));
    }
    let (mut lo, mut hi) = (0.0, cap);
    let mut iters = 0;
    while hi - lo > 1e-13 && iters < 200 {
        let mid = 0.5 * (lo + hi);
        if birge_psi(f, n, mid) <= b {
            hi = mid;
        } else {
            lo = mid;
        }
        iters += 1;
    }
    Ok(report(lo, iters))
}

/// `½ (1 - TV)`.
pub fn le_cam_two_point(tv: f64) -> Result<f64> {
    check_range("tv", tv, 0.0, 1.0, "tv in [0, 1]")?;
    Ok(0.5 * (1.0 - tv))
}

/// `½ (1 - TV(m0, m1))` for the prior-mixed marginals of two hypothesis sets.
pub fn le_cam_fuzzy(m0: &DiscreteDistribution, m1: &DiscreteDistribution) -> Result<f64> {
    let tv = crate::divergence::total_variation(m0, m1)?;
    le_cam_two_point(tv.min(1.0))
}

/// `(d/2)(1 - TV)` over hypercube edges.
pub fn assouad(d: usize, min_edge_tv: f64) -> Result<f64> {
    if d == 0 {
        return Err(BoundError::OutOfRange {
            name: "d",
            value: 0.0,
            expected: "d >= 1",
        });
    }
    check_range("min_edge_tv", min_edge_tv, 0.0, 1.0, "tv in [0, 1]")?;
    Ok(d as f64 / 2.0 * (1.0 - min_edge_tv))
}

/// `(d/2)(1 - √(h²(1 - h²/4)))` over hypercube edges.
pub fn assouad_hellinger(d: usize, min_edge_h2: f64) -> Result<f64> {
    if d == 0 {
        return Err(BoundError::OutOfRange {
            name: "d",
            value: 0.0,
            expected: "d >= 1",
        });
    }
    check_range("min_edge_h2", min_edge_h2, 0.0, 2.0, "h2 in [0, 2]")?;
    let h2 = min_edge_h2;
    Ok(d as f64 / 2.0 * (1.0 - (h2 * (1.0 - h2 / 4.0)).sqrt()))
}

/// Binary entropy in nats with `H(0) = H(1) = 0`.
pub fn binary_entropy(r: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.ln() };
    term(r) + term(1.0 - r)
}

/// `(-I - H(R) - log w_max) / log((1 - w_min) / w_max)`; any zero-one rule
/// with risk `R` must satisfy `R ≥` this value.
pub fn braun_pokutta(i: f64, risk: f64, w_min: f64, w_max: f64) -> Result<f64> {
    if !(w_max > 0.0 && w_max < 1.0) {
        return Err(BoundError::OutOfRange {
            name: "w_max",
            value: w_max,
            expected: "w_max in (0, 1)",
        });
    }
    if !(w_min >= 0.0 && w_min <= w_max) || !(w_min + w_max < 1.0) {
        return Err(BoundError::Precondition(format!(
            "needs w_min + w_max < 1, got {w_min} + {w_max}"
        )));
    }
    check_range("risk", risk, 0.0, 1.0, "risk in [0, 1]")?;
    Ok((-i - binary_entropy(risk) - w_max.ln()) / ((1.0 - w_min) / w_max).ln())
}

/// `N (1 - α) / (s + N)`.
pub fn likelihood_ratio_bound(n_alternatives: usize, s: f64, alpha: f64) -> Result<f64> {
    if n_alternatives < 2 {
        return Err(BoundError::OutOfRange {
            name: "n_alternatives",
            value: n_alternatives as f64,
            expected: "N >= 2",
        });
    }
    if !(alpha < 1.0) {
        return Err(BoundError::OutOfRange {
            name: "alpha",
            value: alpha,
            expected: "alpha < 1",
        });
    }
    if !(s >= 1.0 - alpha) {
        return Err(BoundError::Precondition(format!("s = {s} is below 1 - alpha = {}", 1.0 - alpha)));
    }
    let n = n_alternatives as f64;
    Ok(n * (1.0 - alpha) / (s + n))
}

/// `Σ_i w(Θ_i) · bound_i` for a partition of the parameter space.
pub fn partitioned_bound(pieces: &[(f64, BoundReport)]) -> Result<BoundReport> {
    let mut total_w = 0.0;
    let mut value = 0.0;
    for (i, (w, r)) in pieces.iter().enumerate() {
        if !(*w >= 0.0) {
            return Err(BoundError::InvalidProblem(format!("piece[{i}] has weight {w}")));
        }
        total_w += w;
        if r.valid {
            value += w * r.value;
        }
    }
    if total_w > 1.0 + 1e-12 {
        return Err(BoundError::InvalidProblem(format!("piece weights sum to {total_w}")));
    }
    Ok(BoundReport::new("partitioned", value)
        .with_param("pieces", pieces.len() as f64)
        .with_param("total_weight", total_w))
}

/// `½ max_δ e^{-2p} δ^p (8V)^{-p/d} ∫ r_δ^{-p/d} dw` over the supplied
/// `δ ≤ A^{-1/2}`, where `r_δ` bounds the prior density ratio on `δ`-balls.
pub fn density_partition_bound<F>(
    a_const: f64,
    v_const: f64,
    p: f64,
    d: usize,
    r_delta_integral: F,
    deltas: &[f64],
) -> Result<BoundReport>
where
    F: Fn(f64) -> f64,
{
    let named: [(&'static str, f64); 3] = [("a_const", a_const), ("v_const", v_const), ("p", p)];
    for (name, v) in named {
        if !(v > 0.0) {
            return Err(BoundError::OutOfRange {
                name,
                value: v,
                expected: "positive",
            });
        }
    }
    if d == 0 {
        return Err(BoundError::InvalidProblem("dimension must be at least 1".into()));
    }
    if deltas.is_empty() {
        return Err(BoundError::InvalidProblem("empty delta grid".into()));
    }
    let cap = a_const.powf(-0.5);
    let ratio = p / d as f64;
    let mut best = (0.0, f64::NAN);
    for &delta in deltas {
        if !(delta > 0.0) || delta > cap * (1.0 + 1e-12) {
            return Err(BoundError::OutOfRange {
                name: "delta",
                value: delta,
                expected: "0 < delta <= a_const^(-1/2)",
            });
        }
        let v = 0.5 * (-2.0 * p).exp() * delta.powf(p) * (8.0 * v_const).powf(-ratio) * r_delta_integral(delta);
        if v > best.0 || best.1.is_nan() {
            best = (v, delta);
        }
    }
    Ok(BoundReport::new("density_partition", best.0)
        .with_param("delta", best.1)
        .with_param("p", p)
        .with_param("d", d as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::phi::u_f;

    fn uniform_testing(n: usize) -> DiscreteProblem {
        DiscreteProblem::zero_one(vec![vec![1.0]; n], vec![1.0 / n as f64; n]).unwrap()
    }

    #[test]
    fn r0_examples() {
        assert_abs_diff_eq!(r0(&uniform_testing(5)).unwrap(), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(r0(&uniform_testing(3)).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        let safe = DiscreteProblem::new(
            vec![vec![1.0]; 2],
            vec![0.5, 0.5],
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
        )
        .unwrap();
        assert_eq!(r0(&safe).unwrap(), 0.0);
        let graded = DiscreteProblem::new(vec![vec![1.0]; 2], vec![0.5, 0.5], vec![vec![0.0, 0.5], vec![2.0, 0.0]]).unwrap();
        assert!(r0(&graded).is_err());
    }

    #[test]
    fn fano_examples() {
        let v = generalized_fano(0.0, 0.9, 0.1).unwrap();
        assert_abs_diff_eq!(v, 1.0 - 1.9f64.ln() / 10f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 0.72125, epsilon = 1e-5);
        assert!(v <= 0.9);
        let c = classical_fano(0.0, 10).unwrap();
        assert_abs_diff_eq!(c, 1.0 - 2f64.ln() / 10f64.ln(), epsilon = 1e-14);
        assert!(v >= c);
        assert_eq!(generalized_fano(f64::INFINITY, 0.9, 0.1).unwrap(), 0.0);
        assert!(generalized_fano(0.1, 0.0, 1.0).is_err());
        assert!(generalized_fano(0.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn zero_one_examples() {
        for kind in [
            ZeroOneKind::Chi2,
            ZeroOneKind::Tv,
            ZeroOneKind::Hellinger,
            ZeroOneKind::Generic(ConvexGenerator::kl()),
        ] {
            assert_abs_diff_eq!(zero_one_bound(&kind, 0.0, 0.7).unwrap().value, 0.7, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(zero_one_bound(&ZeroOneKind::Chi2, 0.25, 0.5).unwrap().value, 0.25, epsilon = 1e-15);
        for &(i, r0) in &[(0.1, 0.5), (0.3, 0.8), (2.0, 0.9)] {
            let a = zero_one_bound(&ZeroOneKind::Chi2, i, r0).unwrap().value;
            let custom = ConvexGenerator::custom("x^2-1", |x| x * x - 1.0, -1.0, f64::INFINITY).unwrap();
            let b = zero_one_bound(&ZeroOneKind::Generic(custom), i, r0).unwrap().value;
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
        let bad = zero_one_bound(&ZeroOneKind::Hellinger, 1.5, 0.5).unwrap();
        assert!(!bad.valid);
    }

    #[test]
    fn comparison_conditions_at_the_boundary() {
        for n in [4usize, 8, 16, 64] {
            let nf = n as f64;
            let r0 = 1.0 - 1.0 / nf;
            let chi_edge = nf * nf / (nf - 1.0) * (0.5 - 1.0 / nf).powi(2);
            let v = zero_one_bound(&ZeroOneKind::Chi2, chi_edge, r0).unwrap().value;
            assert!(v >= 0.5 - 1e-12, "n={n}: {v}");
            let v = zero_one_bound(&ZeroOneKind::Chi2, chi_edge * 1.01, r0).unwrap().value;
            assert!(v < 0.5);
            if n >= 8 {
                let kl_edge = 0.5 * (nf / 4.0).ln();
                let v = generalized_fano(kl_edge, r0, 1.0 / nf).unwrap();
                assert!(v >= 0.5 - 1e-12, "n={n}: {v}");
            }
        }
    }

    #[test]
    fn profile_from_problem() {
        let p = DiscreteProblem::new(
            vec![vec![1.0]; 3],
            vec![0.2, 0.3, 0.5],
            vec![vec![0.0, 2.0], vec![1.0, 0.0], vec![2.0, 1.0]],
        )
        .unwrap();
        let prof = SmallBallProfile::from_problem(&p);
        assert_eq!(prof.zero_ball_mass(), 0.3);
        assert_eq!(prof.mass_at(0.5), 0.3);
        assert_abs_diff_eq!(prof.mass_at(1.5), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(prof.mass_at(3.0), 1.0, epsilon = 1e-15);
        assert_eq!(prof.sup_radius_below(0.5), 1.0);
        assert_eq!(prof.sup_radius_below(0.2), 0.0);
        assert_eq!(prof.sup_radius_below(0.0), 0.0);
    }

    #[test]
    fn general_bound_examples() {
        let (c, d, p) = (4.0, 3.0, 2.0);
        let prof = SmallBallProfile::from_fn(move |t: f64| c * t.powf(d / p), None);
        let r = general_bound(&ConvexGenerator::kl(), 0.0, &prof).unwrap();
        assert_abs_diff_eq!(r.value, 0.5 * (0.25f64 / c).powf(p / d), epsilon = 1e-10);
        assert_eq!(general_bound(&ConvexGenerator::chi2(), f64::INFINITY, &prof).unwrap().value, 0.0);
        let h = general_bound(&ConvexGenerator::hellinger(), 0.3, &prof).unwrap();
        assert!(!h.valid);
    }

    #[test]
    fn closed_thresholds_never_exceed_u_f_route() {
        for g in [
            ConvexGenerator::kl(),
            ConvexGenerator::chi2(),
            ConvexGenerator::tv(),
            ConvexGenerator::hellinger(),
        ] {
            for k in 0..200 {
                let x = k as f64 * 0.0015;
                if let Some(t) = general_threshold(&g, x) {
                    assert!(t <= 1.0 - u_f(&g, x) + 1e-8, "{} {x}", g.label());
                }
            }
        }
    }

    #[test]
    fn sharpened_at_half_matches_u_f() {
        let prof = SmallBallProfile::from_fn(|t: f64| t.sqrt() / 10.0, None);
        let chi2 = ConvexGenerator::chi2();
        let s = sharpened_general_bound(&chi2, 0.7, &prof, &[0.5]).unwrap().value;
        let radius = prof.sup_radius_below(1.0 - u_f(&chi2, 0.7));
        assert_abs_diff_eq!(s, 0.5 * radius, epsilon = 1e-8);
        let all = sharpened_general_bound(&chi2, 0.7, &prof, &default_c_grid()).unwrap().value;
        assert!(all >= s);
    }

    #[test]
    fn birge_examples() {
        let kl = ConvexGenerator::kl();
        let zero = vec![vec![0.0; 4]; 4];
        let r = birge_gushchin(&kl, &zero).unwrap();
        assert_abs_diff_eq!(r.value, 0.75, epsilon = 1e-10);

        let tv = ConvexGenerator::tv();
        for &t in &[0.0, 0.3, 0.8, 1.0] {
            let m = vec![vec![0.0, t], vec![t, 0.0]];
            let r = birge_gushchin(&tv, &m).unwrap().value;
            assert_abs_diff_eq!(r, le_cam_two_point(t).unwrap(), epsilon = 1e-8);
        }
        assert!(birge_gushchin(&kl, &[vec![0.0]]).is_err());
    }

    #[test]
    fn classical_examples() {
        assert_eq!(le_cam_two_point(0.0).unwrap(), 0.5);
        assert_eq!(le_cam_two_point(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(le_cam_two_point(0.8).unwrap(), 0.1, epsilon = 1e-12);
        assert!(le_cam_two_point(1.5).is_err());

        let m0 = DiscreteDistribution::new(vec![0.9, 0.1]).unwrap();
        let m1 = DiscreteDistribution::new(vec![0.1, 0.9]).unwrap();
        assert_abs_diff_eq!(le_cam_fuzzy(&m0, &m0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(le_cam_fuzzy(&m0, &m1).unwrap(), 0.1, epsilon = 1e-12);
        let a = DiscreteDistribution::new(vec![1.0, 0.0]).unwrap();
        let b = DiscreteDistribution::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(le_cam_fuzzy(&a, &b).unwrap(), 0.0);

        assert_eq!(assouad(6, 0.0).unwrap(), 3.0);
        assert_abs_diff_eq!(assouad(4, 0.5).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(assouad_hellinger(6, 0.0).unwrap(), 3.0);
        assert!(assouad_hellinger(2, 2.5).is_err());

        assert_abs_diff_eq!(likelihood_ratio_bound(2, 1.0, 0.0).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
        assert!(likelihood_ratio_bound(2, 0.5, 0.0).is_err());
        assert!(likelihood_ratio_bound(1, 1.0, 0.0).is_err());
        let far = likelihood_ratio_bound(1_000_000_000, 1.0, 0.3).unwrap();
        assert_abs_diff_eq!(far, 0.7, epsilon = 1e-8);
    }

    #[test]
    fn braun_pokutta_examples() {
        let v = braun_pokutta(0.0, 0.5, 0.25, 0.25).unwrap();
        assert_abs_diff_eq!(v, 2f64.ln() / 3f64.ln(), epsilon = 1e-12);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!(braun_pokutta(0.0, 0.5, 0.5, 0.5).is_err());
        let n = 10.0f64;
        let u = braun_pokutta(0.3, 0.2, 1.0 / n, 1.0 / n).unwrap();
        assert_abs_diff_eq!(u, (n.ln() - 0.3 - binary_entropy(0.2)) / (n - 1.0).ln(), epsilon = 1e-12);
    }

    #[test]
    fn partition_examples() {
        let inner = BoundReport::new("x", 0.4);
        assert_eq!(partitioned_bound(&[(1.0, inner.clone())]).unwrap().value, 0.4);
        let spike = BoundReport::new("spike", 0.0);
        let v = partitioned_bound(&[(0.3, spike), (0.7, inner.clone())]).unwrap().value;
        assert_abs_diff_eq!(v, 0.28, epsilon = 1e-15);
        assert_eq!(partitioned_bound(&[(0.0, inner.clone())]).unwrap().value, 0.0);
        assert!(partitioned_bound(&[(-0.1, inner)]).is_err());
    }

    #[test]
    fn density_partition_examples() {
        let v = density_partition_bound(1.0, std::f64::consts::PI, 2.0, 2, |_| 1.0, &[1.0]).unwrap();
        assert_abs_diff_eq!(v.value, 0.5 * (-4.0f64).exp() / (8.0 * std::f64::consts::PI), epsilon = 1e-15);
        let z = density_partition_bound(1.0, 1.0, 2.0, 2, |_| 0.0, &[0.5, 1.0]).unwrap();
        assert_eq!(z.value, 0.0);
        assert!(density_partition_bound(1.0, 1.0, 2.0, 2, |_| 1.0, &[1.5]).is_err());
    }
}
