//! The binary kernel `φ_f(a, b) = D_f(Bern(a) || Bern(b))` and its inverses.
//!
//! For zero-one losses the Bayes risk `R` satisfies `φ_f(R, R0) ≤ I` with
//! `R ≤ R0`, where `I` is any upper bound on the f-informativity. Since
//! `a ↦ φ_f(a, b)` is convex and non-increasing on `[0, b]`, the set of
//! admissible risks is an interval `[r*, R0]` and `r*` is a lower bound.

use crate::divergence::{scale_ext, ConvexGenerator, GeneratorKind};
use crate::error::{check_range, BoundError, Result};

pub const BISECTION_TOL: f64 = 1e-10;
pub const BISECTION_MAX_ITER: usize = 200;
pub const DIFF_STEP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionMethod {
    Bisection,
    ExplicitTangent,
    ClosedForm,
}

impl InversionMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            InversionMethod::Bisection => "bisection",
            InversionMethod::ExplicitTangent => "explicit_tangent",
            InversionMethod::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiInversionResult {
    pub lower_bound: f64,
    pub method: InversionMethod,
    pub iterations: usize,
}

/// `φ_f(a, b)` including the boundary cases `b = 0` and `b = 1`.
pub fn phi(f: &ConvexGenerator, a: f64, b: f64) -> Result<f64> {
    check_range("a", a, 0.0, 1.0, "a in [0, 1]")?;
    check_range("b", b, 0.0, 1.0, "b in [0, 1]")?;
    Ok(phi_unchecked(f, a, b))
}

pub(crate) fn phi_unchecked(f: &ConvexGenerator, a: f64, b: f64) -> f64 {
    if b == 0.0 {
        f.evaluate(1.0 - a) + scale_ext(a, f.slope_at_infinity())
    } else if b == 1.0 {
        f.evaluate(a) + scale_ext(1.0 - a, f.slope_at_infinity())
    } else {
        let head = if a == 0.0 {
            scale_ext(b, f.at_zero())
        } else {
            b * f.evaluate_shifted((a - b) / b)
        };
        let tail = if a == 1.0 {
            scale_ext(1.0 - b, f.at_zero())
        } else {
            (1.0 - b) * f.evaluate_shifted((b - a) / (1.0 - b))
        };
        head + tail
    }
}

/// Left derivative of `a ↦ φ_f(a, b)` at `a = r`.
pub fn phi_left_derivative(f: &ConvexGenerator, r: f64, b: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(BoundError::OutOfRange {
            name: "r",
            value: r,
            expected: "r in (0, 1]",
        });
    }
    check_range("b", b, 0.0, 1.0, "b in [0, 1]")?;
    if f.is_tv() {
        return Ok(if r <= b { -1.0 } else { 1.0 });
    }
    if b == 1.0 {
        let slope = f.slope_at_infinity();
        if slope == f64::INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let h = DIFF_STEP.min(r);
        let df = (f.evaluate(r) - f.evaluate(r - h)) / h;
        return Ok(df - slope);
    }
    if b > 0.0 {
        if f.is_kl() {
            return Ok((r / b).ln() - ((1.0 - r) / (1.0 - b)).ln());
        }
        if f.is_chi2() {
            return Ok(2.0 * r / b - 2.0 * (1.0 - r) / (1.0 - b));
        }
    }
    let h = DIFF_STEP.min(r);
    Ok((phi_unchecked(f, r, b) - phi_unchecked(f, r - h, b)) / h)
}

/// Smallest `r ∈ [0, r0]` with `φ_f(r, r0) ≤ informativity`.
pub fn invert_phi(f: &ConvexGenerator, informativity: f64, r0: f64) -> Result<PhiInversionResult> {
    if !(r0 > 0.0 && r0 <= 1.0) {
        return Err(BoundError::OutOfRange {
            name: "r0",
            value: r0,
            expected: "r0 in (0, 1]",
        });
    }
    if informativity.is_nan() {
        return Err(BoundError::OutOfRange {
            name: "informativity",
            value: informativity,
            expected: "informativity >= 0",
        });
    }
    let info = informativity.max(0.0);
    let closed = |v: f64| PhiInversionResult {
        lower_bound: v.clamp(0.0, r0),
        method: InversionMethod::ClosedForm,
        iterations: 0,
    };
    if info == f64::INFINITY {
        return Ok(closed(0.0));
    }
    if f.is_chi2() {
        return Ok(closed(r0 - (r0 * (1.0 - r0) * info).sqrt()));
    }
    if f.is_tv() {
        return Ok(closed(r0 - info));
    }
    if phi_unchecked(f, 0.0, r0) <= info {
        return Ok(PhiInversionResult {
            lower_bound: 0.0,
            method: InversionMethod::Bisection,
            iterations: 0,
        });
    }
    let (mut lo, mut hi) = (0.0, r0);
    let mut iterations = 0;
    while hi - lo > BISECTION_TOL && iterations < BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if phi_unchecked(f, mid, r0) <= info {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(PhiInversionResult {
        lower_bound: lo,
        method: InversionMethod::Bisection,
        iterations,
    })
}

/// Tangent-line lower bound `r + (I - φ_f(r, r0)) / φ'_f(r-, r0)`, clamped
/// to `[0, r0]`.
pub fn explicit_tangent_bound(
    f: &ConvexGenerator,
    informativity: f64,
    r0: f64,
    r: f64,
) -> Result<f64> {
    Ok(tangent_unclamped(f, informativity, r0, r)?.clamp(0.0, r0))
}

pub(crate) fn tangent_unclamped(
    f: &ConvexGenerator,
    informativity: f64,
    r0: f64,
    r: f64,
) -> Result<f64> {
    check_range("r0", r0, 0.0, 1.0, "r0 in (0, 1]")?;
    if !(r > 0.0 && r <= r0) {
        return Err(BoundError::OutOfRange {
            name: "r",
            value: r,
            expected: "0 < r <= r0",
        });
    }
    let slope = phi_left_derivative(f, r, r0)?;
    if !(slope < 0.0) || !slope.is_finite() {
        return Err(BoundError::ZeroDerivative(slope));
    }
    Ok(r + (informativity - phi_unchecked(f, r, r0)) / slope)
}

/// `u_f(x) = inf{b ∈ [1/2, 1] : φ_f(1/2, b) > x}`, with the value 1 when
/// the set is empty.
pub fn u_f(f: &ConvexGenerator, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.5;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    match f.kind() {
        GeneratorKind::Power(a) if a == 1.0 => 0.5 + 0.5 * (-(-2.0 * x).exp_m1()).sqrt(),
        GeneratorKind::Power(a) if a == 2.0 => 0.5 + 0.5 * (x / (1.0 + x)).sqrt(),
        GeneratorKind::Power(a) if a == 0.5 => {
            if x >= 1.0 - std::f64::consts::FRAC_1_SQRT_2 {
                1.0
            } else {
                0.5 + (1.0 - x) * (x * (2.0 - x)).sqrt()
            }
        }
        GeneratorKind::TotalVariation => (0.5 + x).min(1.0),
        _ => u_f_generic(f, x),
    }
}

/// `1 - u_f(x)`, computed without cancellation for the closed-form cases so
/// that tiny thresholds survive large informativities.
pub fn u_f_complement(f: &ConvexGenerator, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.5;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    match f.kind() {
        GeneratorKind::Power(a) if a == 1.0 => {
            let e = (-2.0 * x).exp();
            0.5 * e / (1.0 + (-(-2.0 * x).exp_m1()).sqrt())
        }
        GeneratorKind::Power(a) if a == 2.0 => 0.5 / ((1.0 + x) * (1.0 + (x / (1.0 + x)).sqrt())),
        _ => 1.0 - u_f(f, x),
    }
}

/// Bisection route for [`u_f`], exposed so closed forms can be cross-checked.
pub fn u_f_generic(f: &ConvexGenerator, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.5;
    }
    if phi_unchecked(f, 0.5, 1.0) <= x {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.5, 1.0);
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_TOL * 1e-2 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if phi_unchecked(f, 0.5, mid) > x {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `u_{f,c}(x) = inf{b ∈ [c, 1] : φ_f(c, b) ≥ x}`, with the value 1 when
/// the set is empty.
pub fn u_f_c(f: &ConvexGenerator, c: f64, x: f64) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(BoundError::OutOfRange {
            name: "c",
            value: c,
            expected: "c in (0, 1]",
        });
    }
    if !(x > 0.0) {
        return Ok(c);
    }
    if !(phi_unchecked(f, c, 1.0) >= x) {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (c, 1.0);
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_TOL * 1e-2 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if phi_unchecked(f, c, mid) >= x {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn builtins() -> Vec<ConvexGenerator> {
        vec![
            ConvexGenerator::kl(),
            ConvexGenerator::chi2(),
            ConvexGenerator::tv(),
            ConvexGenerator::hellinger(),
            ConvexGenerator::power(3.0),
            ConvexGenerator::power(-1.0),
        ]
    }

    #[test]
    fn phi_examples() {
        let kl = ConvexGenerator::kl();
        assert_eq!(phi(&kl, 0.5, 0.5).unwrap(), 0.0);
        let v = phi(&kl, 0.5, 0.75).unwrap();
        assert_abs_diff_eq!(v, 0.5 * (1.0 / (4.0 * 0.75 * 0.25f64)).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 0.5 * (4.0f64 / 3.0).ln(), epsilon = 1e-14);
        let tv = phi(&ConvexGenerator::tv(), 0.2, 0.9).unwrap();
        assert_abs_diff_eq!(tv, 0.7, epsilon = 1e-14);
        assert!(phi(&kl, 1.2, 0.5).is_err());
        assert!(phi(&kl, 0.5, -0.1).is_err());
    }

    #[test]
    fn phi_boundary_cases() {
        let kl = ConvexGenerator::kl();
        assert_eq!(phi(&kl, 0.3, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(phi(&kl, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(phi(&kl, 0.0, 0.0).unwrap(), 0.0);
        let tv = ConvexGenerator::tv();
        assert_abs_diff_eq!(phi(&tv, 0.3, 0.0).unwrap(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(phi(&tv, 0.3, 1.0).unwrap(), 0.7, epsilon = 1e-15);
        // boundary formulas are the limits of the interior formula
        for g in builtins() {
            let inner = phi(&g, 0.4, 1.0 - 1e-14).unwrap();
            let edge = phi(&g, 0.4, 1.0).unwrap();
            if edge.is_finite() {
                assert_abs_diff_eq!(inner, edge, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn phi_nonnegative_below_diagonal() {
        for g in builtins() {
            for i in 0..=20 {
                for j in i..=20 {
                    let (a, b) = (i as f64 / 20.0, j as f64 / 20.0);
                    assert!(phi(&g, a, b).unwrap() >= -1e-12, "{} {a} {b}", g.label());
                }
            }
        }
    }

    #[test]
    fn left_derivative_examples() {
        let chi2 = ConvexGenerator::chi2();
        assert_abs_diff_eq!(phi_left_derivative(&chi2, 0.3, 0.3).unwrap(), 0.0, epsilon = 1e-14);

        let kl = ConvexGenerator::kl();
        let r0 = 0.8;
        let d = phi_left_derivative(&kl, r0 / (1.0 + r0), r0).unwrap();
        assert_abs_diff_eq!(d, (1.0 - r0).ln(), epsilon = 1e-12);

        let h = 1e-6;
        let fd = (phi(&kl, 0.25, 0.5).unwrap() - phi(&kl, 0.25 - h, 0.5).unwrap()) / h;
        assert_abs_diff_eq!(phi_left_derivative(&kl, 0.25, 0.5).unwrap(), fd, epsilon = 1e-5);

        assert!(phi_left_derivative(&kl, 0.0, 0.5).is_err());
        assert!(phi_left_derivative(&kl, 1.1, 0.5).is_err());
    }

    #[test]
    fn left_derivative_nonpositive() {
        for g in builtins() {
            for j in 1..=19 {
                let b = j as f64 / 20.0;
                for i in 1..=j {
                    let r = i as f64 / 20.0;
                    let d = phi_left_derivative(&g, r, b).unwrap();
                    assert!(d <= 1e-6, "{} r={r} b={b} d={d}", g.label());
                }
            }
        }
    }

    #[test]
    fn invert_phi_examples() {
        let kl = ConvexGenerator::kl();
        let r = invert_phi(&kl, 0.0, 0.7).unwrap();
        assert_abs_diff_eq!(r.lower_bound, 0.7, epsilon = 1e-10);

        let chi2 = ConvexGenerator::chi2();
        let (i, r0) = (0.05, 0.75);
        let r = invert_phi(&chi2, i, r0).unwrap();
        assert_abs_diff_eq!(r.lower_bound, r0 - (r0 * (1.0 - r0) * i).sqrt(), epsilon = 1e-12);

        // grid scan for the smallest r with φ(r, r0) ≤ I
        let (i, r0) = (0.1, 0.9);
        let got = invert_phi(&kl, i, r0).unwrap();
        assert_eq!(got.method, InversionMethod::Bisection);
        let steps = (r0 / 1e-6) as usize;
        let scan = (0..=steps)
            .map(|k| k as f64 * 1e-6)
            .find(|&r| phi(&kl, r, r0).unwrap() <= i)
            .unwrap();
        assert_abs_diff_eq!(got.lower_bound, scan, epsilon = 2e-6);

        assert_eq!(invert_phi(&kl, f64::INFINITY, 0.5).unwrap().lower_bound, 0.0);
        assert!(invert_phi(&kl, 0.1, 0.0).is_err());
    }

    #[test]
    fn invert_phi_bisection_matches_closed_form() {
        // chi2 via a custom generator forces the bisection path
        let custom = ConvexGenerator::custom("chi2-generic", |x| x * x - 1.0, -1.0, f64::INFINITY).unwrap();
        let chi2 = ConvexGenerator::chi2();
        for &(i, r0) in &[(0.01, 0.5), (0.2, 0.9), (1.0, 0.6), (5.0, 0.99)] {
            let a = invert_phi(&custom, i, r0).unwrap().lower_bound;
            let b = invert_phi(&chi2, i, r0).unwrap().lower_bound;
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn tangent_examples() {
        let kl = ConvexGenerator::kl();
        let (i, r0) = (0.3f64, 0.9f64);
        let r = r0 / (1.0 + r0);
        let fano = 1.0 + (i + (1.0 + r0).ln()) / (1.0 - r0).ln();
        let raw = tangent_unclamped(&kl, i, r0, r).unwrap();
        assert_abs_diff_eq!(raw, fano, epsilon = 1e-12);
        assert_abs_diff_eq!(
            explicit_tangent_bound(&kl, i, r0, r).unwrap(),
            fano.clamp(0.0, r0),
            epsilon = 1e-12
        );

        let r = 0.4;
        let at = phi(&kl, r, r0).unwrap();
        assert_abs_diff_eq!(explicit_tangent_bound(&kl, at, r0, r).unwrap(), r, epsilon = 1e-12);

        let chi2 = ConvexGenerator::chi2();
        assert!(matches!(
            explicit_tangent_bound(&chi2, 0.1, 0.5, 0.5),
            Err(BoundError::ZeroDerivative(_))
        ));
    }

    #[test]
    fn tangent_below_inversion() {
        for g in builtins() {
            for &r0 in &[0.5, 0.75, 0.9] {
                for &i in &[0.01, 0.1, 0.5] {
                    let inv = invert_phi(&g, i, r0).unwrap().lower_bound;
                    for k in 1..10 {
                        let r = r0 * k as f64 / 10.0;
                        if let Ok(t) = explicit_tangent_bound(&g, i, r0, r) {
                            assert!(t <= inv + 1e-9, "{} r0={r0} i={i} r={r}: {t} > {inv}", g.label());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn u_f_examples() {
        for g in builtins() {
            assert_eq!(u_f(&g, 0.0), 0.5);
        }
        let kl = ConvexGenerator::kl();
        let x = 0.3;
        assert_abs_diff_eq!(u_f(&kl, x), 0.5 + 0.5 * (1.0 - (-2.0 * x).exp()).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(u_f(&ConvexGenerator::tv(), 0.3), 0.8, epsilon = 1e-15);
        assert_eq!(u_f(&ConvexGenerator::tv(), 0.7), 1.0);
    }

    #[test]
    fn u_f_closed_forms_match_bisection() {
        let gens = [
            ConvexGenerator::kl(),
            ConvexGenerator::chi2(),
            ConvexGenerator::tv(),
            ConvexGenerator::hellinger(),
        ];
        for g in &gens {
            for k in 0..60 {
                let x = 0.005 * k as f64 + 1e-4;
                let exact = u_f(g, x);
                let generic = u_f_generic(g, x);
                assert_abs_diff_eq!(exact, generic, epsilon = 1e-8);
            }
        }
        // beyond the Hellinger plateau both routes give 1
        let h = ConvexGenerator::hellinger();
        assert_eq!(u_f(&h, 0.3), 1.0);
        assert_eq!(u_f_generic(&h, 0.3), 1.0);
    }

    #[test]
    fn u_f_c_examples() {
        let kl = ConvexGenerator::kl();
        assert_eq!(u_f_c(&kl, 0.3, 0.0).unwrap(), 0.3);
        for &x in &[0.01, 0.1, 0.4, 1.0] {
            assert_abs_diff_eq!(u_f_c(&kl, 0.5, x).unwrap(), u_f(&kl, x), epsilon = 1e-8);
            let chi2 = ConvexGenerator::chi2();
            assert_abs_diff_eq!(u_f_c(&chi2, 0.5, x).unwrap(), u_f(&chi2, x), epsilon = 1e-8);
        }
        let (c, x) = (0.25, 0.2);
        let scan = (0..=750_000)
            .map(|k| c + k as f64 * 1e-6)
            .find(|&b| phi(&kl, c, b.min(1.0)).unwrap() >= x)
            .unwrap();
        assert_abs_diff_eq!(u_f_c(&kl, c, x).unwrap(), scan, epsilon = 1e-6);
        assert!(u_f_c(&kl, 0.0, 0.1).is_err());
    }
}
