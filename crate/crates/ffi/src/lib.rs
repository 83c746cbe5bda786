//! C ABI over `hamsim_core`.
//!
//! Every fallible call returns a [`HamsimStatus`]; on failure the message is
//! available from [`hamsim_last_error`] on the same thread. Objects cross the
//! boundary as opaque handles and must be released with their `_free`
//! function. Strings handed out by the library are released with
//! [`hamsim_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use hamsim_core::cost::{self, Regime, TrotterCostInputs};
use hamsim_core::hamiltonian::{self, NormMode};
use hamsim_core::lab::{self, Experiment, Format, Report, RunOptions, SuiteOptions};
use hamsim_core::Error;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Dimension = 4,
    Capacity = 5,
    DegenerateInput = 6,
    Parse = 7,
    Config = 8,
    Io = 9,
    InfeasibleSegmentation = 10,
    /// A physical precondition failed: non-CPTP channel, invalid state,
    /// non-Hermitian observable and similar.
    Physics = 11,
    OutOfRange = 12,
    /// A panic was caught at the boundary; the library state is unaffected.
    Panic = 99,
}

impl From<&Error> for HamsimStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Dimension(_) => HamsimStatus::Dimension,
            Error::Capacity(_) => HamsimStatus::Capacity,
            Error::DegenerateInput(_) => HamsimStatus::DegenerateInput,
            Error::ChannelIntegrity(_)
            | Error::InvalidState(_)
            | Error::NonHermitian(_)
            | Error::ObservableNorm(_)
            | Error::NonInvertible(_) => HamsimStatus::Physics,
            Error::IndexOutOfRange { .. } => HamsimStatus::OutOfRange,
            Error::InvalidOrder(_) | Error::InvalidArgument(_) => HamsimStatus::InvalidArgument,
            Error::InfeasibleSegmentation { .. } => HamsimStatus::InfeasibleSegmentation,
            Error::Parse { .. } => HamsimStatus::Parse,
            Error::Config(_) | Error::UnknownSuite { .. } => HamsimStatus::Config,
            Error::Io(_) => HamsimStatus::Io,
        }
    }
}

/// Output encoding for [`hamsim_report_render`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamsimFormat {
    Csv = 0,
    Json = 1,
    Plotdata = 2,
}

impl From<HamsimFormat> for Format {
    fn from(f: HamsimFormat) -> Self {
        match f {
            HamsimFormat::Csv => Format::Csv,
            HamsimFormat::Json => Format::Json,
            HamsimFormat::Plotdata => Format::Plotdata,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamsimRegime {
    BelowCritical = 0,
    Critical = 1,
    AboveCritical = 2,
    Optimized = 3,
    Shallow = 4,
}

impl From<Regime> for HamsimRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::BelowCritical => HamsimRegime::BelowCritical,
            Regime::Critical => HamsimRegime::Critical,
            Regime::AboveCritical => HamsimRegime::AboveCritical,
            Regime::Optimized => HamsimRegime::Optimized,
            Regime::Shallow => HamsimRegime::Shallow,
        }
    }
}

/// Overrides for spec-driven runs. `has_seed == 0` keeps the spec's seed and
/// `shots == 0` keeps the spec's shot count.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HamsimRunOptions {
    pub has_seed: i32,
    pub seed: u64,
    pub shots: usize,
}

impl From<&HamsimRunOptions> for RunOptions {
    fn from(o: &HamsimRunOptions) -> Self {
        RunOptions { seed: (o.has_seed != 0).then_some(o.seed), shots: (o.shots != 0).then_some(o.shots) }
    }
}

/// Inputs to the PEC-mitigated Trotter cost model.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HamsimTrotterCost {
    /// Commutator prefactor of the order-k error term, including `t^{k+1}`.
    pub alpha_k: f64,
    pub order: u32,
    pub num_terms: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
}

/// Cost-model output at one target accuracy.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HamsimTrotterCostResult {
    pub epsilon: f64,
    pub epsilon_b: f64,
    pub epsilon_c: f64,
    pub depth: f64,
    pub samples: f64,
    pub samples_gst: f64,
    pub ratio_gst: f64,
    pub regime: HamsimRegime,
}

/// Parsed Hamiltonian.
pub struct HamsimHamiltonian(hamiltonian::Hamiltonian);

/// Parsed and resolved experiment spec.
pub struct HamsimExperiment(Experiment);

/// Result table of a run, sweep, cost evaluation or validation.
pub struct HamsimReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(HamsimStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(HamsimStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(HamsimStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f` behind the error and panic boundary.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HamsimStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HamsimStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            HamsimStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(HamsimStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = value;
    Ok(())
}

fn owned_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(HamsimStatus::InvalidArgument, "output contains an interior NUL".into()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hamsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn hamsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn hamsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// Hamiltonians
// ---------------------------------------------------------------------------

/// Parses `<coefficient> <label>` lines.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hamsim_hamiltonian_parse(text: *const c_char, out: *mut *mut HamsimHamiltonian) -> HamsimStatus {
    guard(|| {
        let h = hamiltonian::Hamiltonian::parse(self::text(text, "text")?)?;
        store(out, HamsimHamiltonian(h))
    })
}

/// # Safety
/// `h` must be NULL or a live handle from [`hamsim_hamiltonian_parse`].
#[no_mangle]
pub unsafe extern "C" fn hamsim_hamiltonian_free(h: *mut HamsimHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of terms, or 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hamsim_hamiltonian_num_terms(h: *const HamsimHamiltonian) -> usize {
    h.as_ref().map_or(0, |h| h.0.num_terms())
}

/// Qubit count, or 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hamsim_hamiltonian_num_qubits(h: *const HamsimHamiltonian) -> usize {
    h.as_ref().map_or(0, |h| h.0.n_qubits())
}

/// Sum of absolute coefficients.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hamsim_hamiltonian_beta(h: *const HamsimHamiltonian, out: *mut f64) -> HamsimStatus {
    guard(|| write(out, handle(h, "hamiltonian")?.0.beta()))
}

/// Nested-commutator sum for product-formula order `order`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hamsim_hamiltonian_alpha_comm(
    h: *const HamsimHamiltonian,
    order: u32,
    out: *mut f64,
) -> HamsimStatus {
    guard(|| write(out, hamiltonian::alpha_comm(&handle(h, "hamiltonian")?.0, order)?))
}

/// First-order prefactor; `exact != 0` uses dense norms, otherwise the
/// triangle-inequality bound.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hamsim_hamiltonian_c1(h: *const HamsimHamiltonian, exact: i32, out: *mut f64) -> HamsimStatus {
    let mode = if exact != 0 { NormMode::Exact } else { NormMode::Triangle };
    guard(|| write(out, hamiltonian::c1_prefactor(&handle(h, "hamiltonian")?.0, mode)?))
}

// ---------------------------------------------------------------------------
// Cost model
// ---------------------------------------------------------------------------

/// Optimal depth and sample count of PEC-mitigated Trotter simulation at
/// target accuracy `epsilon`.
///
/// # Safety
/// `inputs` must point to a valid struct and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn hamsim_trotter_cost(
    inputs: *const HamsimTrotterCost,
    epsilon: f64,
    out: *mut HamsimTrotterCostResult,
) -> HamsimStatus {
    guard(|| {
        let i = handle(inputs, "inputs")?;
        let p = TrotterCostInputs::new(i.alpha_k, i.order, i.num_terms, i.gamma, i.gamma_prime)?;
        let r = cost::trotter_report(&p, epsilon, None)?;
        write(
            out,
            HamsimTrotterCostResult {
                epsilon,
                epsilon_b: r.epsilon_b,
                epsilon_c: r.epsilon_c.unwrap_or(f64::NAN),
                depth: r.d_star.unwrap_or(f64::NAN),
                samples: r.m,
                samples_gst: r.m_g,
                ratio_gst: r.ratio_mg_r,
                regime: r.regime.into(),
            },
        )
    })
}

// ---------------------------------------------------------------------------
// Experiments and reports
// ---------------------------------------------------------------------------

/// Loads a TOML spec; relative paths inside it resolve against its directory.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hamsim_experiment_load(path: *const c_char, out: *mut *mut HamsimExperiment) -> HamsimStatus {
    guard(|| {
        let e = lab::load_spec(Path::new(text(path, "path")?))?;
        store(out, HamsimExperiment(e))
    })
}

/// Parses a TOML spec from memory. `base_dir` may be NULL for the current
/// directory.
///
/// # Safety
/// `spec` must be a valid NUL-terminated string, `base_dir` NULL or valid,
/// and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hamsim_experiment_parse(
    spec: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut HamsimExperiment,
) -> HamsimStatus {
    guard(|| {
        let base = if base_dir.is_null() { "." } else { text(base_dir, "base_dir")? };
        let e = lab::parse_spec(text(spec, "spec")?, Path::new(base))?;
        store(out, HamsimExperiment(e))
    })
}

/// # Safety
/// `e` must be NULL or a live experiment handle.
#[no_mangle]
pub unsafe extern "C" fn hamsim_experiment_free(e: *mut HamsimExperiment) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

#[derive(Clone, Copy)]
enum Action {
    Simulate,
    Cost,
    Sweep,
}

unsafe fn run(
    e: *const HamsimExperiment,
    opts: *const HamsimRunOptions,
    out: *mut *mut HamsimReport,
    action: Action,
) -> HamsimStatus {
    guard(|| {
        let e = &handle(e, "experiment")?.0;
        let opts: RunOptions = opts.as_ref().map(Into::into).unwrap_or_default();
        let report = match action {
            Action::Simulate => lab::simulate(e, &opts)?,
            Action::Cost => lab::cost_report(e, &opts)?,
            Action::Sweep => lab::sweep(e, None, &opts)?,
        };
        store(out, HamsimReport(report))
    })
}

/// One seeded simulation. `opts` may be NULL.
///
/// # Safety
/// `e` must be a live handle, `opts` NULL or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hamsim_simulate(
    e: *const HamsimExperiment,
    opts: *const HamsimRunOptions,
    out: *mut *mut HamsimReport,
) -> HamsimStatus {
    run(e, opts, out, Action::Simulate)
}

/// Cost model at the spec's `[cost] epsilon`. `opts` may be NULL.
///
/// # Safety
/// As for [`hamsim_simulate`].
#[no_mangle]
pub unsafe extern "C" fn hamsim_cost(
    e: *const HamsimExperiment,
    opts: *const HamsimRunOptions,
    out: *mut *mut HamsimReport,
) -> HamsimStatus {
    run(e, opts, out, Action::Cost)
}

/// The spec's `[sweep]`. `opts` may be NULL.
///
/// # Safety
/// As for [`hamsim_simulate`].
#[no_mangle]
pub unsafe extern "C" fn hamsim_sweep(
    e: *const HamsimExperiment,
    opts: *const HamsimRunOptions,
    out: *mut *mut HamsimReport,
) -> HamsimStatus {
    run(e, opts, out, Action::Sweep)
}

/// Runs comma-separated validation suites (`all` for every suite).
/// `shots == 0` keeps each suite's default.
///
/// # Safety
/// `suites` must be a valid NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hamsim_validate(
    suites: *const c_char,
    seed: u64,
    shots: usize,
    out: *mut *mut HamsimReport,
) -> HamsimStatus {
    guard(|| {
        let names: Vec<&str> = text(suites, "suites")?.split(',').map(str::trim).collect();
        let opts = SuiteOptions { seed, shots: (shots != 0).then_some(shots) };
        store(out, HamsimReport(lab::run_suites(&names, &opts)?))
    })
}

/// # Safety
/// `r` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn hamsim_report_free(r: *mut HamsimReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// 1 when every check passed, 0 otherwise, -1 for NULL.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hamsim_report_passed(r: *const HamsimReport) -> i32 {
    r.as_ref().map_or(-1, |r| i32::from(r.0.passed()))
}

/// Number of records, or 0 for NULL.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hamsim_report_num_records(r: *const HamsimReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.records.len())
}

/// Looks up column `key` of record `index`.
///
/// # Safety
/// `r` must be a live handle, `key` a valid string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hamsim_report_value(
    r: *const HamsimReport,
    index: usize,
    key: *const c_char,
    out: *mut f64,
) -> HamsimStatus {
    guard(|| {
        let report = &handle(r, "report")?.0;
        let key = text(key, "key")?;
        let len = report.records.len();
        let rec = report.records.get(index).ok_or(Error::IndexOutOfRange { index, len })?;
        let v = rec
            .get(key)
            .ok_or_else(|| Fail(HamsimStatus::InvalidArgument, format!("record {index} has no column `{key}`")))?;
        write(out, v)
    })
}

/// Renders the report. The caller frees `*out` with [`hamsim_string_free`].
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hamsim_report_render(
    r: *const HamsimReport,
    format: HamsimFormat,
    out: *mut *mut c_char,
) -> HamsimStatus {
    guard(|| {
        let s = lab::render(&handle(r, "report")?.0, format.into())?;
        write(out, owned_string(s)?)
    })
}
