//! C ABI over the wedgeqft toolkit.
//!
//! Models and run configurations are opaque heap handles owned by the caller
//! and released with their `_free` function. Every call returns a
//! [`WqStatus`]; on failure the message is kept per thread and can be read
//! with [`wq_last_error`]. Strings handed out by the library must be released
//! with [`wq_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use wedgeqft::cli::{run_suites, Command};
use wedgeqft::config::RunConfig;
use wedgeqft::nuclearity::{self, KernelOperator, NystromOptions};
use wedgeqft::scattering_function::{linspace, verify_relations, ScatteringFunction, Sign};
use wedgeqft::{Error, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Model = 3,
    Pole = 4,
    Domain = 5,
    Shape = 6,
    Cap = 7,
    Support = 8,
    Overflow = 9,
    NonConvergence = 10,
    Config = 11,
    Io = 12,
    UnknownCommand = 13,
    Panic = 14,
}

impl From<&Error> for WqStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Model(_) => WqStatus::Model,
            Error::Pole { .. } => WqStatus::Pole,
            Error::Domain(_) => WqStatus::Domain,
            Error::Shape(_) => WqStatus::Shape,
            Error::Cap(_) => WqStatus::Cap,
            Error::Support(_) => WqStatus::Support,
            Error::Overflow(_) => WqStatus::Overflow,
            Error::NonConvergence(_) => WqStatus::NonConvergence,
            Error::Config { .. } => WqStatus::Config,
            Error::Io(_) => WqStatus::Io,
        }
    }
}

/// Opaque two-particle scattering function.
pub struct WqModel {
    inner: ScatteringFunction,
}

/// Opaque run configuration.
pub struct WqConfig {
    inner: RunConfig,
}

struct Failure(WqStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(WqStatus::from(&e), e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> WqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            WqStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("panic: {msg}"));
            WqStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(WqStatus::NullPointer, format!("{what} is null"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn model_ref<'a>(p: *const WqModel) -> Result<&'a ScatteringFunction, Failure> {
    p.as_ref().map(|m| &m.inner).ok_or_else(|| null("model"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(WqStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, empty after a success.
///
/// # Safety
/// The pointer stays valid until the next library call on the same thread and
/// must not be freed.
#[no_mangle]
pub unsafe extern "C" fn wq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a scattering function from its sign, exponential factor, mass and
/// zeros `zeros_re[k] + i zeros_im[k]`. With `auto_mirror` each zero off the
/// imaginary axis gets its partner −conj(β) added.
///
/// # Safety
/// `zeros_re` and `zeros_im` must point to `n_zeros` doubles each (they may be
/// null when `n_zeros` is 0). `out_model` must be a valid pointer; on success
/// it receives a handle to release with [`wq_model_free`].
#[no_mangle]
pub unsafe extern "C" fn wq_model_new(
    epsilon: c_int,
    a: f64,
    mass: f64,
    zeros_re: *const f64,
    zeros_im: *const f64,
    n_zeros: usize,
    auto_mirror: bool,
    out_model: *mut *mut WqModel,
) -> WqStatus {
    guard(|| {
        let slot = out(out_model, "out_model")?;
        let zeros: Vec<C64> = if n_zeros == 0 {
            Vec::new()
        } else {
            if zeros_re.is_null() || zeros_im.is_null() {
                return Err(null("zeros"));
            }
            let re = std::slice::from_raw_parts(zeros_re, n_zeros);
            let im = std::slice::from_raw_parts(zeros_im, n_zeros);
            re.iter().zip(im).map(|(&r, &i)| C64::new(r, i)).collect()
        };
        let sign = Sign::from_f64(f64::from(epsilon))?;
        let inner = ScatteringFunction::build(sign, a, &zeros, mass, auto_mirror)?;
        *slot = Box::into_raw(Box::new(WqModel { inner }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wq_model_free(model: *mut WqModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// S₂ at the complex rapidity `re + i im`.
///
/// # Safety
/// `model` must be a live handle; `out_re` and `out_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn wq_model_evaluate(
    model: *const WqModel,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> WqStatus {
    guard(|| {
        let s = model_ref(model)?;
        let (o_re, o_im) = (out(out_re, "out_re")?, out(out_im, "out_im")?);
        let v = s.evaluate(C64::new(re, im))?;
        *o_re = v.re;
        *o_im = v.im;
        Ok(())
    })
}

/// Width of the zero-free strip, capped at π/2.
///
/// # Safety
/// `model` must be a live handle and `out_kappa` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wq_model_kappa(model: *const WqModel, out_kappa: *mut f64) -> WqStatus {
    guard(|| {
        *out(out_kappa, "out_kappa")? = model_ref(model)?.kappa();
        Ok(())
    })
}

/// Supremum of |S₂| over the strip 0 ≤ Im ζ ≤ `kappa`.
///
/// # Safety
/// `model` must be a live handle and `out_norm` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wq_model_strip_norm(model: *const WqModel, kappa: f64, out_norm: *mut f64) -> WqStatus {
    guard(|| {
        let s = model_ref(model)?;
        *out(out_norm, "out_norm")? = s.strip_sup_norm(kappa)?;
        Ok(())
    })
}

/// Checks unitarity, reflection, crossing and hermitian analyticity on
/// `samples` real rapidities in [−window, window].
///
/// # Safety
/// `model` must be a live handle; `out_max_residual` and `out_pass` must be
/// valid pointers.
#[no_mangle]
pub unsafe extern "C" fn wq_model_verify_relations(
    model: *const WqModel,
    window: f64,
    samples: usize,
    tol: f64,
    out_max_residual: *mut f64,
    out_pass: *mut bool,
) -> WqStatus {
    guard(|| {
        let s = model_ref(model)?;
        let (res, pass) = (out(out_max_residual, "out_max_residual")?, out(out_pass, "out_pass")?);
        if !(window > 0.0) || samples < 2 {
            return Err(Error::Domain(format!("need window > 0 and samples ≥ 2, got {window}, {samples}")).into());
        }
        let r = verify_relations(s, &linspace(-window, window, samples), tol)?;
        *res = r.max_residual();
        *pass = r.pass;
        Ok(())
    })
}

/// Trace norm of the kernel e^{−a cosh x}/(x − y + i b). Refinement doubles
/// the window and node count until the relative change drops below 1e-3.
///
/// # Safety
/// `out_value` and `out_converged` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn wq_trace_norm_general(
    a: f64,
    b: f64,
    half_width: f64,
    nodes: usize,
    refine: bool,
    out_value: *mut f64,
    out_converged: *mut bool,
) -> WqStatus {
    guard(|| {
        let (v, c) = (out(out_value, "out_value")?, out(out_converged, "out_converged")?);
        let k = KernelOperator::general(a, b)?;
        let opts = NystromOptions {
            half_width,
            nodes,
            refine,
            ..NystromOptions::default()
        };
        let est = nuclearity::trace_norm_estimate(&k, &opts)?;
        *v = est.value;
        *c = est.converged;
        Ok(())
    })
}

/// Smallest splitting distance s with σ(s)·‖T_s‖₁ < 1, by bisection with
/// absolute tolerance `tol`.
///
/// # Safety
/// `model` must be a live handle and `out_s_min` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wq_find_s_min(
    model: *const WqModel,
    kappa: f64,
    tol: f64,
    out_s_min: *mut f64,
) -> WqStatus {
    guard(|| {
        let s = model_ref(model)?;
        let slot = out(out_s_min, "out_s_min")?;
        let bracket = nuclearity::default_bracket(s.mass());
        let r = nuclearity::find_s_min(s, kappa, bracket, tol, &NystromOptions::default())?;
        *slot = r.s_min;
        Ok(())
    })
}

/// Parses a run configuration from text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out_config` must be a valid
/// pointer and receives a handle to release with [`wq_config_free`].
#[no_mangle]
pub unsafe extern "C" fn wq_config_parse(text: *const c_char, out_config: *mut *mut WqConfig) -> WqStatus {
    guard(|| {
        let slot = out(out_config, "out_config")?;
        let inner = RunConfig::parse(c_str(text, "text")?)?;
        *slot = Box::into_raw(Box::new(WqConfig { inner }));
        Ok(())
    })
}

/// Reads and parses a run configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out_config` must be a valid
/// pointer and receives a handle to release with [`wq_config_free`].
#[no_mangle]
pub unsafe extern "C" fn wq_config_load(path: *const c_char, out_config: *mut *mut WqConfig) -> WqStatus {
    guard(|| {
        let slot = out(out_config, "out_config")?;
        let inner = RunConfig::load(Path::new(c_str(path, "path")?))?;
        *slot = Box::into_raw(Box::new(WqConfig { inner }));
        Ok(())
    })
}

/// Overrides one tolerance, `name=value` as for `--tol-override`
/// (e.g. `"smatrix=1e-9"`).
///
/// # Safety
/// `config` must be a live handle and `assignment` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wq_config_set_tolerance(config: *mut WqConfig, assignment: *const c_char) -> WqStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        cfg.inner.apply_override(c_str(assignment, "assignment")?)?;
        Ok(())
    })
}

/// Replaces the run seed.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wq_config_set_seed(config: *mut WqConfig, seed: u64) -> WqStatus {
    guard(|| {
        config.as_mut().ok_or_else(|| null("config"))?.inner.seed = seed;
        Ok(())
    })
}

/// Builds the model described by the `[model]` section.
///
/// # Safety
/// `config` must be a live handle; `out_model` must be a valid pointer and
/// receives a handle to release with [`wq_model_free`].
#[no_mangle]
pub unsafe extern "C" fn wq_config_model(config: *const WqConfig, out_model: *mut *mut WqModel) -> WqStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let slot = out(out_model, "out_model")?;
        let inner = cfg.inner.model.build()?;
        *slot = Box::into_raw(Box::new(WqModel { inner }));
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wq_config_free(config: *mut WqConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs a command-line subcommand (`"verify-scattering"`, `"all"`, ...) and
/// returns its JSON report. `out_exit_code` receives the exit code the
/// command-line tool would use: 0 pass, 1 failure, 3 non-convergence only.
///
/// # Safety
/// `config` must be a live handle and `command` a NUL-terminated string.
/// `out_exit_code` and `out_json` must be valid pointers; the string stored in
/// `out_json` must be released with [`wq_string_free`].
#[no_mangle]
pub unsafe extern "C" fn wq_run(
    config: *const WqConfig,
    command: *const c_char,
    parallel: bool,
    out_exit_code: *mut c_int,
    out_json: *mut *mut c_char,
) -> WqStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let name = c_str(command, "command")?;
        let (code, json) = (out(out_exit_code, "out_exit_code")?, out(out_json, "out_json")?);
        let cmd = Command::from_name(name)
            .ok_or_else(|| Failure(WqStatus::UnknownCommand, format!("unknown command {name:?}")))?;
        let (report, _) = run_suites(&cmd, &cfg.inner, parallel)?;
        *code = report.exit_code();
        *json = to_c_string(report.to_json());
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
