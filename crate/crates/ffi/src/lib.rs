//! C ABI for the singlecopy toolkit.
//!
//! Every fallible function returns an [`ScStatus`] and writes results through
//! out-pointers. On failure the message is kept per thread and can be read
//! with [`sc_last_error`]. Campaigns and tableaux are opaque handles that must
//! be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use singlecopy::hamiltonian::{HamiltonianScheme, LocalHamiltonian};
use singlecopy::pauli::Basis;
use singlecopy::protocols::{LcsTrialConfig, SchemeConfig, SingletTrialConfig};
use singlecopy::rng::{setup_stream, stream_from_seed, RandomStream};
use singlecopy::runner::{export_records, run_campaign, Campaign, CampaignConfig, DeltaPolicy, OutputFormat};
use singlecopy::stabilizer::StabilizerTableau;
use singlecopy::{bounds, noise, partitions, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Io = 4,
    Simulation = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScScheme {
    Singlet = 0,
    Lcs = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScFormat {
    JsonLines = 0,
    Csv = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScSummary {
    pub trials: u64,
    pub successes: u64,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub pooled_delta_hat: f64,
    /// Margin the certificate was computed at.
    pub delta: f64,
    pub bound: f64,
    pub confidence: f64,
}

/// Finished campaign: records and summary.
pub struct ScCampaign(Campaign);

/// Stabilizer state with its own random stream for measurements.
pub struct ScTableau {
    tableau: StabilizerTableau,
    rng: RandomStream,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ScStatus {
    match e {
        Error::Config(_) | Error::Json(_) | Error::EmptyPartitionSet { .. } => ScStatus::Config,
        Error::Io(_) | Error::Csv(_) => ScStatus::Io,
        Error::InvalidArgument(_) | Error::UnsupportedOperator(_) | Error::Empty(_) => ScStatus::InvalidArgument,
        Error::DenseLimit { .. } | Error::QubitIndex { .. } | Error::Dimension { .. } => ScStatus::Simulation,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            ScStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            ScStatus::Panic
        }
    }
}

fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    // SAFETY: non-null and, per the caller contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure::Core(Error::InvalidArgument(format!("{what} is not UTF-8"))))
}

fn delta_policy(delta: f64) -> DeltaPolicy {
    if delta.is_nan() {
        DeltaPolicy::PostHoc
    } else {
        DeltaPolicy::Fixed(delta)
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn sc_kl_divergence(x: f64, y: f64, out: *mut f64) -> ScStatus {
    guard(|| write_out(out, bounds::kl_divergence(x, y)?))
}

/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn sc_chernoff_bound(delta: f64, k: usize, p: f64, out: *mut f64) -> ScStatus {
    guard(|| write_out(out, bounds::chernoff_separable_bound(delta, k, p)?))
}

/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn sc_mcdiarmid_constants(
    m_settings: usize,
    locality: usize,
    h_max: f64,
    out: *mut f64,
) -> ScStatus {
    guard(|| write_out(out, bounds::mcdiarmid_constants(m_settings, locality, h_max)?))
}

/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn sc_mcdiarmid_bound(n: usize, delta: f64, kappa2: f64, out: *mut f64) -> ScStatus {
    guard(|| write_out(out, bounds::mcdiarmid_separable_bound(n, delta, kappa2)?))
}

/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn sc_ground_state_bound(n: usize, g_e: f64, delta: f64, beta2: f64, out: *mut f64) -> ScStatus {
    guard(|| write_out(out, bounds::ground_state_success_bound(n, g_e, delta, beta2)?))
}

/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn sc_expected_copies(p0: f64, lambda: f64, out: *mut f64) -> ScStatus {
    guard(|| write_out(out, noise::expected_copies(p0, lambda)?))
}

/// Number of regular partitions; fails if it does not fit in 64 bits.
///
/// # Safety
/// `out` must be valid for writing one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn sc_count_regular(n: usize, l: usize, out: *mut u64) -> ScStatus {
    guard(|| {
        let count = partitions::count_regular(n, l)?;
        let count =
            u64::try_from(count).map_err(|_| Error::InvalidArgument(format!("count {count} overflows 64 bits")))?;
        write_out(out, count)
    })
}

fn finish_campaign(cfg: CampaignConfig, out: *mut *mut ScCampaign) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    let campaign = run_campaign(&cfg)?;
    write_out(out, Box::into_raw(Box::new(ScCampaign(campaign))))
}

/// Run a singlet (`n` pairs, `l` ignored) or cluster (`n` qubits, `l`
/// clusters) campaign. `state` takes the CLI forms (`target`,
/// `product:<labels>`, `product:oracle`, `noisy:<lambda>`); a NaN `delta`
/// selects the post-hoc margin; `threads = 0` uses the default pool.
///
/// # Safety
/// `state` must be a NUL-terminated string and `out` valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_campaign_run(
    scheme: ScScheme,
    n: usize,
    l: usize,
    trials: usize,
    seed: u64,
    state: *const c_char,
    delta: f64,
    threads: usize,
    out: *mut *mut ScCampaign,
) -> ScStatus {
    guard(|| {
        let state = read_str(state, "state")?.parse()?;
        let scheme = match scheme {
            ScScheme::Singlet => SchemeConfig::Singlet(SingletTrialConfig::uniform(n)),
            ScScheme::Lcs => SchemeConfig::Lcs(LcsTrialConfig::uniform(n, l)),
        };
        let cfg = CampaignConfig {
            scheme,
            trials,
            master_seed: seed,
            state,
            delta: delta_policy(delta),
            threads: (threads > 0).then_some(threads),
        };
        finish_campaign(cfg, out)
    })
}

/// Hamiltonian-scheme campaign; `hamiltonian_json` is the Hamiltonian file
/// contents. Other arguments as in [`sc_campaign_run`].
///
/// # Safety
/// String arguments must be NUL-terminated and `out` valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_campaign_run_hamiltonian(
    hamiltonian_json: *const c_char,
    restarts: usize,
    trials: usize,
    seed: u64,
    state: *const c_char,
    delta: f64,
    threads: usize,
    out: *mut *mut ScCampaign,
) -> ScStatus {
    guard(|| {
        let h = LocalHamiltonian::from_json_str(read_str(hamiltonian_json, "hamiltonian_json")?)?;
        let state = read_str(state, "state")?.parse()?;
        let scheme = HamiltonianScheme::analyze(h, restarts, &mut setup_stream(seed))?;
        let cfg = CampaignConfig {
            scheme: SchemeConfig::Hamiltonian(Arc::new(scheme)),
            trials,
            master_seed: seed,
            state,
            delta: delta_policy(delta),
            threads: (threads > 0).then_some(threads),
        };
        finish_campaign(cfg, out)
    })
}

/// # Safety
/// `campaign` must come from a `sc_campaign_run*` call; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_campaign_summary(campaign: *const ScCampaign, out: *mut ScSummary) -> ScStatus {
    guard(|| {
        let c = campaign.as_ref().ok_or(Failure::Null("campaign"))?;
        let s = &c.0.summary;
        write_out(
            out,
            ScSummary {
                trials: s.trials as u64,
                successes: s.successes as u64,
                frequency: s.frequency,
                wilson_low: s.wilson_low,
                wilson_high: s.wilson_high,
                pooled_delta_hat: s.pooled_delta_hat,
                delta: s.certificate.delta,
                bound: s.certificate.bound,
                confidence: s.certificate.confidence,
            },
        )
    })
}

/// Success bit of record `index`.
///
/// # Safety
/// `campaign` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_campaign_record_success(
    campaign: *const ScCampaign,
    index: usize,
    out: *mut bool,
) -> ScStatus {
    guard(|| {
        let c = campaign.as_ref().ok_or(Failure::Null("campaign"))?;
        let r = c.0.records.get(index).ok_or_else(|| {
            Error::InvalidArgument(format!("record {index} out of range for {} records", c.0.records.len()))
        })?;
        write_out(out, r.success)
    })
}

/// # Safety
/// `campaign` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sc_campaign_export(
    campaign: *const ScCampaign,
    path: *const c_char,
    format: ScFormat,
) -> ScStatus {
    guard(|| {
        let c = campaign.as_ref().ok_or(Failure::Null("campaign"))?;
        let path = read_str(path, "path")?;
        let format = match format {
            ScFormat::JsonLines => OutputFormat::JsonLines,
            ScFormat::Csv => OutputFormat::Csv,
        };
        Ok(export_records(&c.0.records, Path::new(path), format)?)
    })
}

/// # Safety
/// `campaign` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sc_campaign_free(campaign: *mut ScCampaign) {
    if !campaign.is_null() {
        drop(Box::from_raw(campaign));
    }
}

/// Cluster state on an `n`-qubit ring; measurements draw from `seed`.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_tableau_new_lcs(n: usize, seed: u64, out: *mut *mut ScTableau) -> ScStatus {
    guard(|| {
        let tableau = StabilizerTableau::init_lcs(n)?;
        write_out(out, Box::into_raw(Box::new(ScTableau { tableau, rng: stream_from_seed(seed) })))
    })
}

/// `|0...0>` on `n` qubits.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_tableau_new_zero(n: usize, seed: u64, out: *mut *mut ScTableau) -> ScStatus {
    guard(|| {
        let tableau = StabilizerTableau::zero_state(n)?;
        write_out(out, Box::into_raw(Box::new(ScTableau { tableau, rng: stream_from_seed(seed) })))
    })
}

/// # Safety
/// `tableau` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sc_tableau_num_qubits(tableau: *const ScTableau) -> usize {
    tableau.as_ref().map_or(0, |t| t.tableau.num_qubits())
}

fn parse_basis(basis: c_char) -> Result<Basis, Failure> {
    Basis::from_char(basis as u8 as char).ok_or_else(|| {
        Failure::Core(Error::InvalidArgument(format!("basis {:?} is not X, Y or Z", basis as u8 as char)))
    })
}

/// Measure `qubit` in basis `'X'`, `'Y'` or `'Z'`, collapsing the state.
///
/// # Safety
/// `tableau` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_tableau_measure(
    tableau: *mut ScTableau,
    qubit: usize,
    basis: c_char,
    out: *mut u8,
) -> ScStatus {
    guard(|| {
        let t = tableau.as_mut().ok_or(Failure::Null("tableau"))?;
        let bit = t.tableau.measure_pauli(qubit, parse_basis(basis)?, &mut t.rng)?;
        write_out(out, bit)
    })
}

/// Outcome of measuring `qubit` if it is certain (0 or 1), otherwise -1.
///
/// # Safety
/// `tableau` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_tableau_deterministic(
    tableau: *const ScTableau,
    qubit: usize,
    basis: c_char,
    out: *mut i32,
) -> ScStatus {
    guard(|| {
        let t = tableau.as_ref().ok_or(Failure::Null("tableau"))?;
        let outcome = t.tableau.deterministic_outcome(qubit, parse_basis(basis)?)?;
        write_out(out, outcome.map_or(-1, i32::from))
    })
}

/// # Safety
/// `tableau` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sc_tableau_free(tableau: *mut ScTableau) {
    if !tableau.is_null() {
        drop(Box::from_raw(tableau));
    }
}
