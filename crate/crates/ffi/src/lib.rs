//! C interface to `hurstlab`.
//!
//! Every function returns an [`HlStatus`]; on failure the message is
//! available from [`hl_last_error_message`] on the same thread. Handles
//! (`HlConfig`, `HlMcTable`) are opaque and must be released with their
//! `_free` function. Strings returned by the library are released with
//! [`hl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hurstlab::mc::{run_grid, McCell, McConfig, McTable};
use hurstlab::{
    estimate, sample_stable, stable_cf, Error, EstimatorConfig, Method, MethodSpec, Seed, Series,
    StableParams,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    EmptyInput = 3,
    Domain = 4,
    InsufficientScales = 5,
    DegenerateRegression = 6,
    DegenerateSeries = 7,
    CellFailure = 8,
    Format = 9,
    Ordering = 10,
    EmptyResult = 11,
    Io = 12,
    OutOfRange = 13,
    Panic = 14,
}

impl From<&Error> for HlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) => HlStatus::InvalidParameter,
            Error::EmptyInput(_) => HlStatus::EmptyInput,
            Error::Domain(_) => HlStatus::Domain,
            Error::InsufficientScales(_) => HlStatus::InsufficientScales,
            Error::DegenerateRegression => HlStatus::DegenerateRegression,
            Error::DegenerateSeries { .. } => HlStatus::DegenerateSeries,
            Error::CellFailure { .. } => HlStatus::CellFailure,
            Error::Format(_) => HlStatus::Format,
            Error::Ordering { .. } => HlStatus::Ordering,
            Error::EmptyResult(_) => HlStatus::EmptyResult,
            Error::Io(_) => HlStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

struct Failure(HlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(HlStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(HlStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> HlStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HlStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            HlStatus::Panic
        }
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next library call on this thread.
#[no_mangle]
pub extern "C" fn hl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlStableParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl HlStableParams {
    fn to_params(self) -> Result<StableParams, Failure> {
        Ok(StableParams::new(self.alpha, self.beta, self.gamma, self.delta)?)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlMethod {
    Rs = 0,
    Dma = 1,
    Mfdfa = 2,
    Ghe = 3,
}

impl From<Method> for HlMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Rs => HlMethod::Rs,
            Method::Dma => HlMethod::Dma,
            Method::Mfdfa => HlMethod::Mfdfa,
            Method::Ghe => HlMethod::Ghe,
        }
    }
}

/// A method and its moment order. `q` is ignored for R/S and DMA.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlMethodSpec {
    pub method: HlMethod,
    pub q: f64,
}

impl HlMethodSpec {
    fn to_spec(self) -> Result<MethodSpec, Failure> {
        Ok(match self.method {
            HlMethod::Rs => MethodSpec::RS,
            HlMethod::Dma => MethodSpec::DMA,
            HlMethod::Mfdfa => MethodSpec::mfdfa(self.q)?,
            HlMethod::Ghe => MethodSpec::ghe(self.q)?,
        })
    }
}

/// Plain estimator settings; fill from [`hl_estimator_settings_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlEstimatorSettings {
    pub scale_base: usize,
    pub min_scale: usize,
    pub max_scale_fraction: f64,
    pub dma_lambda_min: usize,
    pub dma_lambda_max: usize,
    pub ghe_tau_min: usize,
    pub ghe_tau_max: usize,
    pub detrend_order: usize,
}

impl From<&EstimatorConfig> for HlEstimatorSettings {
    fn from(c: &EstimatorConfig) -> Self {
        HlEstimatorSettings {
            scale_base: c.scale_base,
            min_scale: c.min_scale,
            max_scale_fraction: c.max_scale_fraction,
            dma_lambda_min: c.dma_lambda_min,
            dma_lambda_max: c.dma_lambda_max,
            ghe_tau_min: c.ghe_tau_min,
            ghe_tau_max: c.ghe_tau_max,
            detrend_order: c.detrend_order,
        }
    }
}

#[no_mangle]
pub extern "C" fn hl_estimator_settings_default() -> HlEstimatorSettings {
    HlEstimatorSettings::from(&EstimatorConfig::default())
}

/// Validated estimator configuration.
pub struct HlConfig(EstimatorConfig);

/// Creates a configuration; `settings` may be null for the defaults.
///
/// # Safety
/// `settings` must be null or valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_config_new(settings: *const HlEstimatorSettings, out: *mut *mut HlConfig) -> HlStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let cfg = match settings.as_ref() {
            None => EstimatorConfig::default(),
            Some(s) => EstimatorConfig {
                scale_base: s.scale_base,
                min_scale: s.min_scale,
                max_scale_fraction: s.max_scale_fraction,
                dma_lambda_min: s.dma_lambda_min,
                dma_lambda_max: s.dma_lambda_max,
                ghe_tau_min: s.ghe_tau_min,
                ghe_tau_max: s.ghe_tau_max,
                detrend_order: s.detrend_order,
            },
        };
        cfg.validate()?;
        *out = Box::into_raw(Box::new(HlConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `config` must be null or come from [`hl_config_new`].
#[no_mangle]
pub unsafe extern "C" fn hl_config_settings(config: *const HlConfig, out: *mut HlEstimatorSettings) -> HlStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = HlEstimatorSettings::from(&cfg.0);
        Ok(())
    })
}

/// # Safety
/// `config` must be null or come from [`hl_config_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn hl_config_free(config: *mut HlConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

unsafe fn config_or_default(config: *const HlConfig) -> EstimatorConfig {
    config.as_ref().map_or_else(EstimatorConfig::default, |c| c.0.clone())
}

unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

/// Writes `n` stable draws to `out`.
///
/// # Safety
/// `params` must be valid and `out` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_sample_stable(params: *const HlStableParams, n: usize, seed: u64, out: *mut f64) -> HlStatus {
    guard(|| {
        let params = params.as_ref().ok_or_else(|| null("params"))?.to_params()?;
        if out.is_null() {
            return Err(null("out"));
        }
        let values = sample_stable(params, n, Seed(seed))?;
        std::slice::from_raw_parts_mut(out, n).copy_from_slice(&values);
        Ok(())
    })
}

/// Characteristic function of the stable law at `u`.
///
/// # Safety
/// `params` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_stable_cf(params: *const HlStableParams, u: f64, out: *mut HlComplex) -> HlStatus {
    guard(|| {
        let params = params.as_ref().ok_or_else(|| null("params"))?.to_params()?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if !u.is_finite() {
            return Err(Failure(HlStatus::Domain, format!("argument {u} is not finite")));
        }
        let v = stable_cf(params, u);
        *out = HlComplex { re: v.re, im: v.im };
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlEstimate {
    pub hurst: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Estimates the Hurst exponent of `len` increments. `config` may be null.
///
/// # Safety
/// `values` must hold `len` doubles, `method` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hl_estimate(
    values: *const f64,
    len: usize,
    method: *const HlMethodSpec,
    config: *const HlConfig,
    out: *mut HlEstimate,
) -> HlStatus {
    guard(|| {
        let spec = method.as_ref().ok_or_else(|| null("method"))?.to_spec()?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let values = slice(values, len, "values")?;
        let series = Series::increments(values.to_vec())?;
        let est = estimate(&series, spec, &config_or_default(config))?;
        *out = HlEstimate {
            hurst: est.hurst,
            slope: est.fit.slope,
            intercept: est.fit.intercept,
            r_squared: est.fit.r_squared,
            n_points: est.fit.points.len(),
        };
        Ok(())
    })
}

/// Monte Carlo results, one cell per (method, length, alpha).
pub struct HlMcTable(McTable);

/// One table cell. `status` is nonzero when every replication failed; the
/// statistics are then NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlMcCell {
    pub alpha: f64,
    pub log2_length: u32,
    pub method: HlMethodSpec,
    pub mean: f64,
    pub q025: f64,
    pub q975: f64,
    pub n_effective: usize,
    pub n_failed: usize,
    pub status: HlStatus,
}

/// Runs a grid. `config` may be null for the default estimator settings.
///
/// # Safety
/// Array arguments must hold the stated counts; `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn hl_mc_run(
    alphas: *const f64,
    n_alphas: usize,
    log2_lengths: *const u32,
    n_lengths: usize,
    methods: *const HlMethodSpec,
    n_methods: usize,
    replications: usize,
    seed: u64,
    config: *const HlConfig,
    out: *mut *mut HlMcTable,
) -> HlStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let methods = slice(methods, n_methods, "methods")?
            .iter()
            .map(|m| m.to_spec())
            .collect::<Result<Vec<_>, _>>()?;
        let mc = McConfig {
            alphas: slice(alphas, n_alphas, "alphas")?.to_vec(),
            log2_lengths: slice(log2_lengths, n_lengths, "log2_lengths")?.to_vec(),
            replications,
            methods,
            master_seed: Seed(seed),
            estimator_config: config_or_default(config),
        };
        let table = run_grid(&mc)?;
        *out = Box::into_raw(Box::new(HlMcTable(table)));
        Ok(())
    })
}

/// Number of cells, or 0 for a null table.
///
/// # Safety
/// `table` must be null or come from [`hl_mc_run`].
#[no_mangle]
pub unsafe extern "C" fn hl_mc_table_len(table: *const HlMcTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.entries.len())
}

/// # Safety
/// `table` must come from [`hl_mc_run`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_mc_table_cell(table: *const HlMcTable, index: usize, out: *mut HlMcCell) -> HlStatus {
    guard(|| {
        let table = table.as_ref().ok_or_else(|| null("table"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let entry = table.0.entries.get(index).ok_or_else(|| {
            Failure(
                HlStatus::OutOfRange,
                format!("cell index {index} out of range (table has {})", table.0.entries.len()),
            )
        })?;
        let key = entry.key;
        let method = HlMethodSpec { method: key.method.method.into(), q: key.method.q };
        *out = match &entry.outcome {
            Ok(McCell { mean, q025, q975, n_effective, n_failed, .. }) => HlMcCell {
                alpha: key.alpha,
                log2_length: key.log2_length,
                method,
                mean: *mean,
                q025: *q025,
                q975: *q975,
                n_effective: *n_effective,
                n_failed: *n_failed,
                status: HlStatus::Ok,
            },
            Err(e) => HlMcCell {
                alpha: key.alpha,
                log2_length: key.log2_length,
                method,
                mean: f64::NAN,
                q025: f64::NAN,
                q975: f64::NAN,
                n_effective: 0,
                n_failed: match e {
                    Error::CellFailure { failed, .. } => *failed,
                    _ => 0,
                },
                status: HlStatus::from(e),
            },
        };
        Ok(())
    })
}

/// The table as CSV. Release with [`hl_string_free`].
///
/// # Safety
/// `table` must come from [`hl_mc_run`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_mc_table_csv(table: *const HlMcTable, out: *mut *mut c_char) -> HlStatus {
    guard(|| {
        let table = table.as_ref().ok_or_else(|| null("table"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let csv = CString::new(table.0.to_csv_string())
            .map_err(|e| Failure(HlStatus::Format, e.to_string()))?;
        *out = csv.into_raw();
        Ok(())
    })
}

/// # Safety
/// `table` must be null or come from [`hl_mc_run`], freed once.
#[no_mangle]
pub unsafe extern "C" fn hl_mc_table_free(table: *mut HlMcTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}
