//! C interface to the dying-channel library.
//!
//! Configurations live behind opaque handles created by `dcl_*_new` and
//! released by the matching `dcl_*_free`. Every fallible call returns a
//! [`DclStatus`]; on failure `dcl_last_error_message` holds a description
//! for the calling thread. Results are written through out-pointers, which
//! are left untouched on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dying_channel::analytic::{
    exact_outage_k1, high_snr_outage, optimal_k_high_snr, outage_lower_bound, outage_upper_bound, SingleChannelConfig,
};
use dying_channel::channel::{AttackModel, FadingModel, PowerVector};
use dying_channel::montecarlo::{
    estimate_outage_parallel, estimate_outage_parallel_mdep, estimate_outage_single, McOptions,
};
use dying_channel::parallel::{
    gaussian_outage_indep, gaussian_outage_mdep, outage_exponent_indep, outage_exponent_mdep, y_moments, ParallelConfig,
};
use dying_channel::power::{solve_power, PowerProgram, SolveStatus};
use dying_channel::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DclStatus {
    Ok = 0,
    NullPointer = 1,
    /// Argument outside its domain.
    Domain = 2,
    Model = 3,
    Unsupported = 4,
    Precondition = 5,
    Infeasible = 6,
    Calibration = 7,
    OutOfRegime = 8,
    /// Output buffer too small.
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DclFading {
    /// Independent Rayleigh blocks; exponential power gain with the given rate.
    Rayleigh = 0,
    /// Independent log-normal blocks, `exp(N(0, 1))`.
    LogNormal = 1,
    /// One Rayleigh gain shared by all blocks.
    IdenticalRayleigh = 2,
    IdenticalLogNormal = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DclProgram {
    /// Chosen from the fading model.
    Auto = 0,
    Uniform = 1,
    HighSnrRayleigh = 2,
    LogNormalUpper = 3,
}

/// Opaque single-channel configuration.
pub struct DclSingleConfig(SingleChannelConfig);

/// Opaque parallel-channel configuration.
pub struct DclParallelConfig(ParallelConfig);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DclEstimate {
    pub p_hat: f64,
    /// Standard error of `p_hat`.
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DclOptimalK {
    pub beta: f64,
    pub c: f64,
    pub xi: f64,
    pub k_real: f64,
    pub k_int: usize,
    pub interior: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DclMoments {
    pub mean: f64,
    pub variance: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DclExponent {
    pub value: f64,
    /// Optimising MGF argument.
    pub s_star: f64,
    pub gaussian_bound: f64,
    pub bracket_capped: bool,
    pub low_t: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DclSolveInfo {
    pub objective: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    /// True when the solver met its tolerance.
    pub optimal: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DclStatus {
    match e {
        Error::Domain(_) => DclStatus::Domain,
        Error::Model(_) => DclStatus::Model,
        Error::UnsupportedModel(_) => DclStatus::Unsupported,
        Error::Precondition(_) => DclStatus::Precondition,
        Error::Infeasible { .. } => DclStatus::Infeasible,
        Error::Calibration { .. } => DclStatus::Calibration,
        Error::OutOfRegime(_) => DclStatus::OutOfRegime,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), DclStatus>>(f: F) -> DclStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DclStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            DclStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, DclStatus>;
}

impl<T> OrStatus<T> for dying_channel::Result<T> {
    fn or_status(self) -> Result<T, DclStatus> {
        self.map_err(|e| {
            set_error(e.to_string());
            status_of(&e)
        })
    }
}

fn null() -> DclStatus {
    set_error("null pointer argument".into());
    DclStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, DclStatus> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write<T>(p: *mut T, v: T) -> Result<(), DclStatus> {
    if p.is_null() {
        return Err(null());
    }
    p.write(v);
    Ok(())
}

fn fading_model(kind: DclFading, rate: f64) -> dying_channel::Result<FadingModel> {
    Ok(match kind {
        DclFading::Rayleigh => FadingModel::rayleigh(rate)?,
        DclFading::LogNormal => FadingModel::LogNormalStd,
        DclFading::IdenticalRayleigh => FadingModel::identical(FadingModel::rayleigh(rate)?),
        DclFading::IdenticalLogNormal => FadingModel::identical(FadingModel::LogNormalStd),
    })
}

/// Exponential attack with the given rate; a rate of 0 means no attack.
fn attack_model(rate: f64) -> dying_channel::Result<AttackModel> {
    if rate == 0.0 {
        Ok(AttackModel::NeverAttack)
    } else {
        AttackModel::exponential(rate)
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dcl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dcl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Create a single-channel configuration. `fading_rate` is ignored for
/// log-normal fading; `attack_rate` 0 disables the attack.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn dcl_single_new(
    k: usize,
    rate: f64,
    power: f64,
    fading: DclFading,
    fading_rate: f64,
    attack_rate: f64,
    out: *mut *mut DclSingleConfig,
) -> DclStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let f = fading_model(fading, fading_rate).or_status()?;
        let a = attack_model(attack_rate).or_status()?;
        let cfg = SingleChannelConfig::new(k, rate, power, f, a).or_status()?;
        write(out, Box::into_raw(Box::new(DclSingleConfig(cfg))))
    })
}

/// Release a handle from `dcl_single_new`. NULL is ignored.
///
/// # Safety
/// `cfg` must come from `dcl_single_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dcl_single_free(cfg: *mut DclSingleConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Lower and upper outage bounds for uniform power.
///
/// # Safety
/// `cfg` must be a live handle; `lower` and `upper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcl_single_bounds(cfg: *const DclSingleConfig, lower: *mut f64, upper: *mut f64) -> DclStatus {
    guard(|| {
        let c = &deref(cfg)?.0;
        if lower.is_null() || upper.is_null() {
            return Err(null());
        }
        let lo = outage_lower_bound(c).or_status()?;
        let hi = outage_upper_bound(c).or_status()?;
        write(lower, lo)?;
        write(upper, hi)
    })
}

/// High-SNR outage approximation (independent Rayleigh, exponential attack).
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcl_single_high_snr(cfg: *const DclSingleConfig, out: *mut f64) -> DclStatus {
    guard(|| {
        let v = high_snr_outage(&deref(cfg)?.0).or_status()?;
        write(out, v)
    })
}

/// Exact outage for a single block.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcl_single_exact_k1(cfg: *const DclSingleConfig, out: *mut f64) -> DclStatus {
    guard(|| {
        let v = exact_outage_k1(&deref(cfg)?.0).or_status()?;
        write(out, v)
    })
}

/// Optimal coding length in the high-SNR regime; the handle's `K` is unused.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcl_single_optimal_k(cfg: *const DclSingleConfig, out: *mut DclOptimalK) -> DclStatus {
    guard(|| {
        let s = optimal_k_high_snr(&deref(cfg)?.0).or_status()?;
        write(
            out,
            DclOptimalK { beta: s.beta, c: s.c, xi: s.xi, k_real: s.k_real, k_int: s.k_int, interior: s.interior },
        )
    })
}

/// Monte Carlo outage. `powers` may be NULL for uniform power, otherwise it
/// holds `K` block powers averaging at most the configured power.
///
/// # Safety
/// `cfg` must be a live handle, `powers` NULL or readable for `K` values,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcl_single_mc(
    cfg: *const DclSingleConfig,
    powers: *const f64,
    trials: u64,
    seed: u64,
    out: *mut DclEstimate,
) -> DclStatus {
    guard(|| {
        let c = &deref(cfg)?.0;
        let pv = if powers.is_null() {
            PowerVector::uniform(c.k, c.power)
        } else {
            PowerVector::new(std::slice::from_raw_parts(powers, c.k).to_vec(), c.power)
        }
        .or_status()?;
        let e = estimate_outage_single(c, &pv, &McOptions::new(trials, seed)).or_status()?;
        write(out, DclEstimate { p_hat: e.p_hat, std_error: e.stderr, trials: e.trials, seed: e.seed })
    })
}

/// Outage-minimising block powers. `powers` receives `K` values.
///
/// # Safety
/// `cfg` must be a live handle, `powers` writable for `len` values, `info`
/// NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn dcl_single_optimize_power(
    cfg: *const DclSingleConfig,
    program: DclProgram,
    powers: *mut f64,
    len: usize,
    info: *mut DclSolveInfo,
) -> DclStatus {
    guard(|| {
        let c = &deref(cfg)?.0;
        if powers.is_null() {
            return Err(null());
        }
        if len < c.k {
            set_error(format!("power buffer holds {len} values, need {}", c.k));
            return Err(DclStatus::BufferTooSmall);
        }
        let prog = match program {
            DclProgram::Auto => PowerProgram::for_fading(&c.fading).or_status()?,
            DclProgram::Uniform => PowerProgram::Uniform,
            DclProgram::HighSnrRayleigh => PowerProgram::HighSnrRayleigh,
            DclProgram::LogNormalUpper => PowerProgram::LogNormalUpper,
        };
        let rep = solve_power(c, prog).or_status()?;
        std::slice::from_raw_parts_mut(powers, c.k).copy_from_slice(rep.power.as_slice());
        if !info.is_null() {
            info.write(DclSolveInfo {
                objective: rep.objective,
                kkt_residual: rep.kkt_residual,
                iterations: rep.iterations,
                optimal: rep.status == SolveStatus::Optimal,
            });
        }
        Ok(())
    })
}

/// Create a parallel configuration of `n` sub-channels sharing total power
/// `power` and total rate `rate`. `m` 0 means independent attacks; otherwise
/// neighbouring surviving-block counts within distance `m` have correlation
/// `rho`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcl_parallel_new(
    n: usize,
    k: usize,
    power: f64,
    rate: f64,
    m: usize,
    rho: f64,
    fading: DclFading,
    fading_rate: f64,
    attack_rate: f64,
    out: *mut *mut DclParallelConfig,
) -> DclStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let f = fading_model(fading, fading_rate).or_status()?;
        let a = attack_model(attack_rate).or_status()?;
        let cfg = ParallelConfig::new(n, k, power, rate, m, rho, f, a).or_status()?;
        write(out, Box::into_raw(Box::new(DclParallelConfig(cfg))))
    })
}

/// Release a handle from `dcl_parallel_new`. NULL is ignored.
///
/// # Safety
/// `cfg` must come from `dcl_parallel_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dcl_parallel_free(cfg: *mut DclParallelConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Mean and variance of the per-sub-channel throughput.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcl_parallel_moments(cfg: *const DclParallelConfig, out: *mut DclMoments) -> DclStatus {
    guard(|| {
        let c = &deref(cfg)?.0;
        let y = y_moments(&c.fading, &c.attack, c.k).or_status()?;
        write(out, DclMoments { mean: y.mean, variance: y.variance })
    })
}

/// Gaussian approximation of the outage; uses the m-dependent variance when
/// the handle has `m >= 1`.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcl_parallel_gaussian(cfg: *const DclParallelConfig, out: *mut f64) -> DclStatus {
    guard(|| {
        let c = &deref(cfg)?.0;
        let v = if c.m == 0 { gaussian_outage_indep(c) } else { gaussian_outage_mdep(c) }.or_status()?;
        write(out, v)
    })
}

/// Monte Carlo outage. With `m >= 1`, `realized_corr` (may be NULL)
/// receives the measured neighbour correlation of surviving-block counts.
///
/// # Safety
/// `cfg` must be a live handle, `out` writable, `realized_corr` NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn dcl_parallel_mc(
    cfg: *const DclParallelConfig,
    trials: u64,
    seed: u64,
    out: *mut DclEstimate,
    realized_corr: *mut f64,
) -> DclStatus {
    guard(|| {
        let c = &deref(cfg)?.0;
        if out.is_null() {
            return Err(null());
        }
        let opts = McOptions::new(trials, seed);
        let (e, corr) = if c.m == 0 {
            (estimate_outage_parallel(c, &opts).or_status()?, f64::NAN)
        } else {
            let d = estimate_outage_parallel_mdep(c, &opts).or_status()?;
            (d.estimate, d.realized_corr)
        };
        if !realized_corr.is_null() {
            realized_corr.write(corr);
        }
        write(out, DclEstimate { p_hat: e.p_hat, std_error: e.stderr, trials: e.trials, seed: e.seed })
    })
}

/// Outage exponent at rate per unit cost `t`. Independent attacks use the
/// large-deviations rate; `m >= 1` gives the Gaussian lower bound.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcl_parallel_exponent(
    cfg: *const DclParallelConfig,
    t: f64,
    out: *mut DclExponent,
) -> DclStatus {
    guard(|| {
        let c = &deref(cfg)?.0;
        let r = if c.m == 0 {
            outage_exponent_indep(&c.fading, &c.attack, c.k, t)
        } else {
            outage_exponent_mdep(&c.fading, &c.attack, c.k, c.m, c.rho, t)
        }
        .or_status()?;
        write(
            out,
            DclExponent {
                value: r.value,
                s_star: r.s_star,
                gaussian_bound: r.gaussian_bound,
                bracket_capped: r.bracket_capped,
                low_t: r.low_t,
            },
        )
    })
}
