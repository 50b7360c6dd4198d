//! C ABI over `bayesbound`.
//!
//! Every function returns a [`BbStatus`] and writes results through out
//! pointers. Generators and problems are opaque heap handles released with
//! their `_free` function. On failure [`bb_last_error_message`] describes
//! the most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bayesbound::bounds::{generalized_fano, r0, sup_zero_ball};
use bayesbound::informativity::{
    chi2_informativity_exact, hellinger_informativity_exact, mutual_information_exact,
};
use bayesbound::oracle::exact_bayes_risk;
use bayesbound::report::{parse_config, run, write_json};
use bayesbound::{BoundError, ConvexGenerator, DiscreteDistribution, DiscreteProblem};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Precondition = 4,
    NotPositiveDefinite = 5,
    Unsupported = 6,
    InvalidUtf8 = 7,
    Panic = 8,
}

/// Opaque convex generator handle.
pub struct BbGenerator(ConvexGenerator);

/// Opaque finite decision problem handle.
pub struct BbProblem(DiscreteProblem);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &BoundError) -> BbStatus {
    match err {
        BoundError::AlphabetMismatch { .. } | BoundError::DimensionMismatch { .. } => BbStatus::DimensionMismatch,
        BoundError::NotPositiveDefinite => BbStatus::NotPositiveDefinite,
        BoundError::Precondition(_) | BoundError::ZeroDerivative(_) | BoundError::Monotonicity(_) => {
            BbStatus::Precondition
        }
        BoundError::Unsupported(_) => BbStatus::Unsupported,
        _ => BbStatus::InvalidArgument,
    }
}

fn guard<F>(body: F) -> BbStatus
where
    F: FnOnce() -> Result<(), (BbStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            BbStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BbStatus::Panic
        }
    }
}

fn lift<T>(r: bayesbound::Result<T>) -> Result<T, (BbStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (BbStatus, String) {
    (BbStatus::NullPointer, format!("{name} is null"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (BbStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], (BbStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn generator<'a>(g: *const BbGenerator) -> Result<&'a ConvexGenerator, (BbStatus, String)> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("generator"))
}

unsafe fn problem<'a>(p: *const BbProblem) -> Result<&'a DiscreteProblem, (BbStatus, String)> {
    p.as_ref().map(|p| &p.0).ok_or_else(|| null("problem"))
}

unsafe fn emit_generator(g: ConvexGenerator, out: *mut *mut BbGenerator) -> Result<(), (BbStatus, String)> {
    write_out(out, Box::into_raw(Box::new(BbGenerator(g))))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Power generator `f_α`; `α = 1` is KL, `2` is χ², `1/2` is Hellinger.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_generator_power(alpha: f64, out: *mut *mut BbGenerator) -> BbStatus {
    guard(|| {
        if !alpha.is_finite() {
            return Err((BbStatus::InvalidArgument, format!("alpha = {alpha} is not finite")));
        }
        emit_generator(ConvexGenerator::power(alpha), out)
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_generator_tv(out: *mut *mut BbGenerator) -> BbStatus {
    guard(|| emit_generator(ConvexGenerator::tv(), out))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_generator_tsybakov(s: f64, out: *mut *mut BbGenerator) -> BbStatus {
    guard(|| emit_generator(lift(ConvexGenerator::tsybakov(s))?, out))
}

/// # Safety
/// `g` must come from a `bb_generator_*` constructor (or be null) and not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bb_generator_free(g: *mut BbGenerator) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// `D_f(p || q)` for probability vectors of length `len`.
///
/// # Safety
/// `p` and `q` must point to `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bb_f_divergence(
    g: *const BbGenerator,
    p: *const f64,
    q: *const f64,
    len: usize,
    out: *mut f64,
) -> BbStatus {
    guard(|| {
        let f = generator(g)?;
        let p = lift(DiscreteDistribution::new(slice(p, len, "p")?.to_vec()))?;
        let q = lift(DiscreteDistribution::new(slice(q, len, "q")?.to_vec()))?;
        write_out(out, lift(bayesbound::f_divergence_discrete(f, &p, &q))?)
    })
}

/// `φ_f(a, b)`, the divergence between Bernoulli(a) and Bernoulli(b).
///
/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bb_phi(g: *const BbGenerator, a: f64, b: f64, out: *mut f64) -> BbStatus {
    guard(|| write_out(out, lift(bayesbound::phi(generator(g)?, a, b))?))
}

/// Smallest `r ≤ r0` with `φ_f(r, r0) ≤ informativity`.
///
/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bb_invert_phi(
    g: *const BbGenerator,
    informativity: f64,
    r0: f64,
    out: *mut f64,
) -> BbStatus {
    guard(|| {
        let r = lift(bayesbound::invert_phi(generator(g)?, informativity, r0))?;
        write_out(out, r.lower_bound)
    })
}

/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bb_u_f(g: *const BbGenerator, x: f64, out: *mut f64) -> BbStatus {
    guard(|| {
        if x.is_nan() || x < 0.0 {
            return Err((BbStatus::InvalidArgument, format!("x = {x} must be nonnegative")));
        }
        write_out(out, bayesbound::u_f(generator(g)?, x))
    })
}

/// Builds a finite problem from row-major matrices: `channel` is
/// `n_params × n_obs`, `prior` has `n_params` entries and `loss` is
/// `n_params × n_actions`. A null `loss` means zero-one loss with
/// `n_actions = n_params`.
///
/// # Safety
/// Pointers must reference arrays of the stated sizes; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bb_problem_new(
    channel: *const f64,
    n_params: usize,
    n_obs: usize,
    prior: *const f64,
    loss: *const f64,
    n_actions: usize,
    out: *mut *mut BbProblem,
) -> BbStatus {
    guard(|| {
        let rows = |data: &[f64], width: usize| -> Vec<Vec<f64>> {
            if width == 0 {
                vec![Vec::new(); n_params]
            } else {
                data.chunks(width).map(<[f64]>::to_vec).collect()
            }
        };
        let ch = rows(slice(channel, n_params * n_obs, "channel")?, n_obs);
        let w = slice(prior, n_params, "prior")?.to_vec();
        let p = if loss.is_null() {
            lift(DiscreteProblem::zero_one(ch, w))?
        } else {
            let l = rows(slice(loss, n_params * n_actions, "loss")?, n_actions);
            lift(DiscreteProblem::new(ch, w, l))?
        };
        write_out(out, Box::into_raw(Box::new(BbProblem(p))))
    })
}

/// # Safety
/// `p` must come from `bb_problem_new` (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bb_problem_free(p: *mut BbProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bb_exact_bayes_risk(p: *const BbProblem, out: *mut f64) -> BbStatus {
    guard(|| write_out(out, exact_bayes_risk(problem(p)?).risk))
}

/// # Safety
/// `p` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bb_mutual_information(p: *const BbProblem, out: *mut f64) -> BbStatus {
    guard(|| write_out(out, mutual_information_exact(problem(p)?).value))
}

/// # Safety
/// `p` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bb_chi2_informativity(p: *const BbProblem, out: *mut f64) -> BbStatus {
    guard(|| write_out(out, chi2_informativity_exact(problem(p)?).value))
}

/// # Safety
/// `p` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bb_hellinger_informativity(p: *const BbProblem, out: *mut f64) -> BbStatus {
    guard(|| write_out(out, hellinger_informativity_exact(problem(p)?).value))
}

/// No-data Bayes risk of a zero-one problem.
///
/// # Safety
/// `p` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bb_r0(p: *const BbProblem, out: *mut f64) -> BbStatus {
    guard(|| write_out(out, lift(r0(problem(p)?))?))
}

/// Generalized Fano bound from a mutual-information upper bound; pass the
/// problem to take `r0` and the zero-ball mass from it.
///
/// # Safety
/// `p` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bb_generalized_fano(p: *const BbProblem, informativity: f64, out: *mut f64) -> BbStatus {
    guard(|| {
        let pr = problem(p)?;
        let v = lift(generalized_fano(informativity, lift(r0(pr))?, sup_zero_ball(pr)))?;
        write_out(out, v)
    })
}

/// Runs a JSON config and returns the JSON report in `out_json` (release
/// with [`bb_string_free`]) and the dominance status (0 pass, 1 fail) in
/// `out_exit`. Config errors return `InvalidArgument`.
///
/// # Safety
/// `config` must be a NUL-terminated string; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bb_run_config_json(
    config: *const c_char,
    out_json: *mut *mut c_char,
    out_exit: *mut i32,
) -> BbStatus {
    guard(|| {
        if config.is_null() {
            return Err(null("config"));
        }
        if out_json.is_null() || out_exit.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(config)
            .to_str()
            .map_err(|e| (BbStatus::InvalidUtf8, e.to_string()))?;
        let cfg = parse_config(text).map_err(|d| {
            let msgs: Vec<String> = d.iter().map(ToString::to_string).collect();
            (BbStatus::InvalidArgument, msgs.join("; "))
        })?;
        let report = lift(run(&cfg))?;
        let json = CString::new(write_json(&report)).map_err(|e| (BbStatus::InvalidArgument, e.to_string()))?;
        out_exit.write(report.exit_status());
        out_json.write(json.into_raw());
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
