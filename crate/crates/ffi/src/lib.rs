//! C ABI over `hardylab`.
//!
//! Sequences and weights cross the boundary as opaque handles created by the
//! `*_new` constructors and released with the matching `*_free`. Every
//! fallible call returns a [`HardyStatus`]; on failure a description is
//! available from [`hardy_last_error_message`] until the next call on the
//! same thread. Indices are 1-based, as in the library.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hardylab::optimizer::EstimateOptions;
use hardylab::oracles::SuiteConfig;
use hardylab::report::{full_analysis, parse_weight_str, AnalysisConfig};
use hardylab::{ConeVector, HardyError, LambdaSeq, Params, WeightSpec};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardyStatus {
    Ok = 0,
    RejectedInput = 1,
    DivergentSeries = 2,
    ZeroDenominator = 3,
    NonFinite = 4,
    SearchFailed = 5,
    ParseError = 6,
    IoError = 7,
    NullPointer = 8,
    Panic = 9,
}

/// Opaque non-increasing sequence `λ` with its partial sums.
pub struct HardyLambda(LambdaSeq);

/// Opaque weight sequence `b`.
pub struct HardyWeights(WeightSpec);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HardyBounds {
    pub u_prime: f64,
    pub lower: f64,
    pub upper_new: f64,
    pub upper_bge: f64,
    pub u_double_prime: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HardyCondition {
    pub u_prime: f64,
    pub argmax_n: usize,
    pub tail_error: f64,
    pub n_max: usize,
    /// True when the scanned maximum is the supremum over all n.
    pub exact: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HardyEstimate {
    pub estimate: f64,
    pub n_trunc: usize,
    pub iterations: usize,
    pub witness_len: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum FfiError {
    Lib(HardyError),
    Null(&'static str),
}

impl From<HardyError> for FfiError {
    fn from(e: HardyError) -> Self {
        FfiError::Lib(e)
    }
}

fn status_of(e: &HardyError) -> HardyStatus {
    match e {
        HardyError::RejectedInput { .. } => HardyStatus::RejectedInput,
        HardyError::DivergentSeries(_) => HardyStatus::DivergentSeries,
        HardyError::ZeroDenominator(_) => HardyStatus::ZeroDenominator,
        HardyError::NonFinite(_) => HardyStatus::NonFinite,
        HardyError::SearchFailed(_) => HardyStatus::SearchFailed,
        HardyError::Parse { .. } => HardyStatus::ParseError,
        HardyError::Io(_) => HardyStatus::IoError,
    }
}

fn guard(f: impl FnOnce() -> Result<(), FfiError>) -> HardyStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HardyStatus::Ok,
        Ok(Err(FfiError::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(FfiError::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            HardyStatus::NullPointer
        }
        Err(_) => {
            set_last_error("panic inside hardylab".into());
            HardyStatus::Panic
        }
    }
}

unsafe fn slice<'a>(
    data: *const f64,
    len: usize,
    what: &'static str,
) -> Result<&'a [f64], FfiError> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(FfiError::Null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, FfiError> {
    p.as_ref().ok_or(FfiError::Null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), FfiError> {
    if out.is_null() {
        return Err(FfiError::Null(what));
    }
    out.write(value);
    Ok(())
}

/// Description of the last error on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn hardy_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hardy_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Validates `values[0..len]` as a non-increasing sequence with
/// `values[0] > 0` and stores a new handle in `*out`.
#[no_mangle]
pub unsafe extern "C" fn hardy_lambda_new(
    values: *const f64,
    len: usize,
    out: *mut *mut HardyLambda,
) -> HardyStatus {
    guard(|| {
        let v = slice(values, len, "values")?;
        let l = LambdaSeq::new(v)?;
        write(out, Box::into_raw(Box::new(HardyLambda(l))), "out")
    })
}

/// The unit sequence `λ ≡ 1`.
#[no_mangle]
pub unsafe extern "C" fn hardy_lambda_unit(out: *mut *mut HardyLambda) -> HardyStatus {
    guard(|| {
        write(
            out,
            Box::into_raw(Box::new(HardyLambda(LambdaSeq::unit()))),
            "out",
        )
    })
}

/// Stored length of a sequence; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn hardy_lambda_len(lambda: *const HardyLambda) -> usize {
    lambda.as_ref().map_or(0, |l| l.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn hardy_lambda_free(lambda: *mut HardyLambda) {
    if !lambda.is_null() {
        drop(Box::from_raw(lambda));
    }
}

#[no_mangle]
pub unsafe extern "C" fn hardy_weights_explicit(
    values: *const f64,
    len: usize,
    out: *mut *mut HardyWeights,
) -> HardyStatus {
    guard(|| {
        let w = WeightSpec::explicit(slice(values, len, "values")?)?;
        write(out, Box::into_raw(Box::new(HardyWeights(w))), "out")
    })
}

/// `b_n = n^alpha`.
#[no_mangle]
pub unsafe extern "C" fn hardy_weights_power(
    alpha: f64,
    out: *mut *mut HardyWeights,
) -> HardyStatus {
    guard(|| {
        let w = WeightSpec::power(alpha)?;
        write(out, Box::into_raw(Box::new(HardyWeights(w))), "out")
    })
}

/// `b_n = r^n`, `0 < r < 1`.
#[no_mangle]
pub unsafe extern "C" fn hardy_weights_geometric(
    r: f64,
    out: *mut *mut HardyWeights,
) -> HardyStatus {
    guard(|| {
        let w = WeightSpec::geometric(r)?;
        write(out, Box::into_raw(Box::new(HardyWeights(w))), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hardy_weights_free(weights: *mut HardyWeights) {
    if !weights.is_null() {
        drop(Box::from_raw(weights));
    }
}

/// Parses a weight-file document (`{"b": …, "lambda": …}`) into two new
/// handles.
#[no_mangle]
pub unsafe extern "C" fn hardy_parse_weights_json(
    json: *const c_char,
    out_weights: *mut *mut HardyWeights,
    out_lambda: *mut *mut HardyLambda,
) -> HardyStatus {
    guard(|| {
        if json.is_null() {
            return Err(FfiError::Null("json"));
        }
        if out_weights.is_null() || out_lambda.is_null() {
            return Err(FfiError::Null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| HardyError::Parse {
                location: "json".into(),
                message: format!("not UTF-8: {e}"),
            })?;
        let (w, l) = parse_weight_str(text)?;
        write(
            out_weights,
            Box::into_raw(Box::new(HardyWeights(w))),
            "out_weights",
        )?;
        write(
            out_lambda,
            Box::into_raw(Box::new(HardyLambda(l))),
            "out_lambda",
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn hardy_c_refined(
    lambda: *const HardyLambda,
    p: f64,
    n: usize,
    out: *mut f64,
) -> HardyStatus {
    guard(|| {
        let l = deref(lambda, "lambda")?;
        write(out, hardylab::c_refined(&l.0, Params::new(p)?, n)?, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hardy_c_effective(
    lambda: *const HardyLambda,
    p: f64,
    n: usize,
    out: *mut f64,
) -> HardyStatus {
    guard(|| {
        let l = deref(lambda, "lambda")?;
        write(out, hardylab::c_effective(&l.0, Params::new(p)?, n)?, "out")
    })
}

/// Partial sum of `Σ_{k≥n} b_k / Λ_k^p` and a bound on the omitted tail.
#[no_mangle]
pub unsafe extern "C" fn hardy_tail_sum(
    weights: *const HardyWeights,
    lambda: *const HardyLambda,
    p: f64,
    n: usize,
    out_value: *mut f64,
    out_error: *mut f64,
) -> HardyStatus {
    guard(|| {
        let (w, l) = (deref(weights, "weights")?, deref(lambda, "lambda")?);
        let (v, e) = hardylab::tail_sum(&w.0, &l.0, Params::new(p)?, n)?;
        write(out_value, v, "out_value")?;
        write(out_error, e, "out_error")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hardy_condition_ratio(
    weights: *const HardyWeights,
    lambda: *const HardyLambda,
    p: f64,
    n: usize,
    out: *mut f64,
) -> HardyStatus {
    guard(|| {
        let (w, l) = (deref(weights, "weights")?, deref(lambda, "lambda")?);
        write(
            out,
            hardylab::condition_ratio(&w.0, &l.0, Params::new(p)?, n)?,
            "out",
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn hardy_best_u_prime(
    weights: *const HardyWeights,
    lambda: *const HardyLambda,
    p: f64,
    n_max: usize,
    out: *mut HardyCondition,
) -> HardyStatus {
    guard(|| {
        let (w, l) = (deref(weights, "weights")?, deref(lambda, "lambda")?);
        let r = hardylab::best_u_prime(&w.0, &l.0, Params::new(p)?, n_max)?;
        write(
            out,
            HardyCondition {
                u_prime: r.u_prime,
                argmax_n: r.argmax_n,
                tail_error: r.tail_error,
                n_max: r.n_max,
                exact: r.exact,
            },
            "out",
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn hardy_u_bounds(
    u_prime: f64,
    p: f64,
    out: *mut HardyBounds,
) -> HardyStatus {
    guard(|| {
        if !(u_prime >= 0.0 && u_prime.is_finite()) {
            return Err(HardyError::RejectedInput {
                what: "u_prime must be finite and >= 0".into(),
                index: None,
            }
            .into());
        }
        let r = hardylab::u_bounds(u_prime, Params::new(p)?);
        write(
            out,
            HardyBounds {
                u_prime: r.u_prime,
                lower: r.lower,
                upper_new: r.upper_new,
                upper_bge: r.upper_bge,
                u_double_prime: r.u_double_prime,
            },
            "out",
        )
    })
}

/// Hardy ratio of the non-increasing trial vector `x[0..len]`.
#[no_mangle]
pub unsafe extern "C" fn hardy_ratio(
    weights: *const HardyWeights,
    lambda: *const HardyLambda,
    p: f64,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> HardyStatus {
    guard(|| {
        let (w, l) = (deref(weights, "weights")?, deref(lambda, "lambda")?);
        let x = ConeVector::new(slice(x, len, "x")?)?;
        write(
            out,
            hardylab::hardy_ratio(&w.0, &l.0, Params::new(p)?, &x)?.ratio,
            "out",
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn hardy_f_n(
    lambda: *const HardyLambda,
    p: f64,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> HardyStatus {
    guard(|| {
        let l = deref(lambda, "lambda")?;
        let x = ConeVector::new(slice(x, len, "x")?)?;
        write(out, hardylab::f_n(&l.0, Params::new(p)?, &x)?, "out")
    })
}

/// Projects `v[0..len]` onto the non-increasing non-negative cone, writing
/// the result to `out[0..len]` (which may alias `v`).
#[no_mangle]
pub unsafe extern "C" fn hardy_isotonic_project(
    v: *const f64,
    len: usize,
    out: *mut f64,
) -> HardyStatus {
    guard(|| {
        if len == 0 {
            return Ok(());
        }
        let projected = hardylab::isotonic_project(slice(v, len, "v")?);
        if out.is_null() {
            return Err(FfiError::Null("out"));
        }
        ptr::copy(projected.values().as_ptr(), out, len);
        Ok(())
    })
}

/// Best-constant lower bound. When `witness` is non-NULL and
/// `witness_cap >= out->witness_len`, the witness vector is copied there.
#[no_mangle]
pub unsafe extern "C" fn hardy_estimate_best_constant(
    weights: *const HardyWeights,
    lambda: *const HardyLambda,
    p: f64,
    n_trunc: usize,
    restarts: usize,
    seed: u64,
    out: *mut HardyEstimate,
    witness: *mut f64,
    witness_cap: usize,
) -> HardyStatus {
    guard(|| {
        let (w, l) = (deref(weights, "weights")?, deref(lambda, "lambda")?);
        let opts = EstimateOptions {
            n_trunc,
            restarts,
            seed,
            ..Default::default()
        };
        let cert = hardylab::estimate_best_constant(&w.0, &l.0, Params::new(p)?, &opts)?;
        let wl = cert.witness.len();
        if !witness.is_null() && witness_cap >= wl {
            ptr::copy_nonoverlapping(cert.witness.values().as_ptr(), witness, wl);
        }
        write(
            out,
            HardyEstimate {
                estimate: cert.estimate,
                n_trunc: cert.n_trunc,
                iterations: cert.iterations,
                witness_len: wl,
            },
            "out",
        )
    })
}

/// Runs the full analysis on a weight-file document and returns the JSON
/// report in `*out_json` (release with [`hardy_string_free`]). A report
/// that stopped early is still returned, with its `incomplete` field set.
#[no_mangle]
pub unsafe extern "C" fn hardy_analyze_json(
    weights_json: *const c_char,
    p: f64,
    n_max: usize,
    n_trunc: usize,
    restarts: usize,
    seed: u64,
    trials: usize,
    out_json: *mut *mut c_char,
) -> HardyStatus {
    guard(|| {
        if weights_json.is_null() {
            return Err(FfiError::Null("weights_json"));
        }
        let text = CStr::from_ptr(weights_json)
            .to_str()
            .map_err(|e| HardyError::Parse {
                location: "weights_json".into(),
                message: format!("not UTF-8: {e}"),
            })?;
        let (w, l) = parse_weight_str(text)?;
        let cfg = AnalysisConfig {
            n_max,
            estimate: EstimateOptions {
                n_trunc,
                restarts,
                seed,
                ..Default::default()
            },
            suite: SuiteConfig {
                trials,
                seed,
                ..Default::default()
            },
        };
        let report = full_analysis(&w, &l, Params::new(p)?, &cfg);
        let s = CString::new(report.to_json()?).map_err(|e| HardyError::Io(e.to_string()))?;
        write(out_json, s.into_raw(), "out_json")
    })
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn hardy_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
