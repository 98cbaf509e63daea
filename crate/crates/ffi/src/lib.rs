//! C ABI for `algocool`.
//!
//! Objects are opaque handles created by `ac_*_new`/`ac_*_compile`/`ac_run`
//! and released with the matching `ac_*_free`. Every fallible call returns an
//! [`AcStatus`]; on failure a message is available from
//! [`ac_last_error_message`] on the same thread. Strings handed out by the
//! library must be released with [`ac_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use algocool::analysis::{check_shannon, run, Mode, RunReport};
use algocool::compile::{compile_fig2_demo, compile_pac1_multi, compile_pac2, Comp3Form};
use algocool::{thermo, DiagonalState, Error, GateKind, GateSpec, Program, Role, ThermalConfig};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BitOutOfRange = 3,
    CapExceeded = 4,
    Policy = 5,
    Parse = 6,
    Io = 7,
    Internal = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcMode {
    Ideal = 0,
    Finite = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcGateKind {
    Cnot = 0,
    CswapVariant = 1,
    Comp3TwoGate = 2,
    Comp3Perm = 3,
    Swap = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcRole {
    Computation = 0,
    Reset = 1,
}

/// Thermal parameters. A NaN relaxation time means "unset": computation bits
/// then never relax and reset bits rethermalize instantly.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcThermalConfig {
    pub eps0: f64,
    pub t1_comp: f64,
    pub t1_reset: f64,
    pub compute_duration: f64,
    pub reset_duration: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AcCost {
    pub compute_steps: u64,
    pub reset_steps: u64,
    pub total_time_steps: u64,
}

/// Compiled program.
pub struct AcProgram(Program);
/// Result of executing a program.
pub struct AcReport {
    report: RunReport,
    program: Program,
}
/// Full probability distribution over a register.
pub struct AcState(DiagonalState);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> AcStatus {
    match err {
        Error::BitOutOfRange { .. } => AcStatus::BitOutOfRange,
        Error::CapExceeded { .. } => AcStatus::CapExceeded,
        Error::Policy(_) => AcStatus::Policy,
        Error::Parse(_) | Error::Json(_) | Error::Csv(_) => AcStatus::Parse,
        Error::Io(_) => AcStatus::Io,
        Error::Internal(_) => AcStatus::Internal,
        _ => AcStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and turning panics into [`AcStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), (AcStatus, String)>) -> AcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside algocool".into());
            AcStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (AcStatus, String)>;
}

impl<T> IntoFfi<T> for algocool::Result<T> {
    fn ffi(self) -> Result<T, (AcStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (AcStatus, String) {
    (AcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (AcStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (AcStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), (AcStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

fn form(two_gate: bool) -> Comp3Form {
    if two_gate {
        Comp3Form::TwoGate
    } else {
        Comp3Form::SinglePermutation
    }
}

fn unset(x: f64) -> Option<f64> {
    (!x.is_nan()).then_some(x)
}

fn thermal(cfg: &AcThermalConfig) -> Result<ThermalConfig, (AcStatus, String)> {
    let t = ThermalConfig {
        t1_comp: unset(cfg.t1_comp),
        t1_reset: unset(cfg.t1_reset),
        compute_duration: cfg.compute_duration,
        reset_duration: cfg.reset_duration,
        ..ThermalConfig::ideal(cfg.eps0)
    };
    t.validate().ffi()?;
    Ok(t)
}

fn gate_kind(kind: AcGateKind) -> GateKind {
    match kind {
        AcGateKind::Cnot => GateKind::Cnot,
        AcGateKind::CswapVariant => GateKind::CswapVariant,
        AcGateKind::Comp3TwoGate => GateKind::Comp3TwoGate,
        AcGateKind::Comp3Perm => GateKind::Comp3Perm,
        AcGateKind::Swap => GateKind::Swap,
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn ac_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ac_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Ideal-mode parameters for the given bath bias.
#[no_mangle]
pub extern "C" fn ac_thermal_config_ideal(eps0: f64) -> AcThermalConfig {
    AcThermalConfig {
        eps0,
        t1_comp: f64::NAN,
        t1_reset: f64::NAN,
        compute_duration: 1.0,
        reset_duration: 1.0,
    }
}

// ---- programs ----

/// Compiles PAC1 cooling `m` bits to level `j_f`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_program_compile_pac1(
    j_f: u32,
    m: usize,
    two_gate: bool,
    out: *mut *mut AcProgram,
) -> AcStatus {
    guard(|| {
        let p = compile_pac1_multi(m, j_f, form(two_gate)).ffi()?;
        put(out, Box::into_raw(Box::new(AcProgram(p))))
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_program_compile_pac2(
    j_f: u32,
    two_gate: bool,
    out: *mut *mut AcProgram,
) -> AcStatus {
    guard(|| {
        let p = compile_pac2(j_f, form(two_gate)).ffi()?;
        put(out, Box::into_raw(Box::new(AcProgram(p))))
    })
}

/// The six-bit compress, swap, reset demonstration cycle.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_program_compile_demo(
    two_gate: bool,
    out: *mut *mut AcProgram,
) -> AcStatus {
    guard(|| {
        let p = compile_fig2_demo(form(two_gate)).ffi()?;
        put(out, Box::into_raw(Box::new(AcProgram(p))))
    })
}

/// Parses a program from its JSON-lines text.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_program_from_jsonl(
    text: *const c_char,
    out: *mut *mut AcProgram,
) -> AcStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| (AcStatus::Parse, e.to_string()))?;
        let p = Program::from_jsonl(s).ffi()?;
        put(out, Box::into_raw(Box::new(AcProgram(p))))
    })
}

/// # Safety
/// `program` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ac_program_free(program: *mut AcProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Register width, or 0 for a null handle.
///
/// # Safety
/// `program` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ac_program_n_bits(program: *const AcProgram) -> usize {
    program.as_ref().map_or(0, |p| p.0.n_bits)
}

/// # Safety
/// `program` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_program_cost(program: *const AcProgram, out: *mut AcCost) -> AcStatus {
    guard(|| {
        let c = deref(program, "program")?.0.cost;
        put(
            out,
            AcCost {
                compute_steps: c.compute_steps,
                reset_steps: c.reset_steps,
                total_time_steps: c.total_time_steps,
            },
        )
    })
}

/// First target bit.
///
/// # Safety
/// `program` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_program_target(program: *const AcProgram, out: *mut usize) -> AcStatus {
    guard(|| {
        let p = &deref(program, "program")?.0;
        let t = *p.targets.first().ok_or((
            AcStatus::InvalidArgument,
            "program has no target bit".to_string(),
        ))?;
        put(out, t)
    })
}

/// JSON-lines serialization; free with [`ac_string_free`].
///
/// # Safety
/// `program` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_program_to_jsonl(
    program: *const AcProgram,
    out: *mut *mut c_char,
) -> AcStatus {
    guard(|| {
        let text = deref(program, "program")?.0.to_jsonl().ffi()?;
        put(out, c_string(text))
    })
}

/// Human-readable listing; free with [`ac_string_free`].
///
/// # Safety
/// `program` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_program_disassemble(
    program: *const AcProgram,
    out: *mut *mut c_char,
) -> AcStatus {
    guard(|| put(out, c_string(deref(program, "program")?.0.disassemble())))
}

// ---- execution ----

/// Executes `program` on the exact distribution.
///
/// # Safety
/// `program` and `config` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_run(
    program: *const AcProgram,
    config: *const AcThermalConfig,
    mode: AcMode,
    out: *mut *mut AcReport,
) -> AcStatus {
    guard(|| {
        let p = &deref(program, "program")?.0;
        let cfg = thermal(deref(config, "config")?)?;
        let mode = match mode {
            AcMode::Ideal => Mode::Ideal,
            AcMode::Finite => Mode::Finite,
        };
        let report = run(p, &cfg, mode).ffi()?;
        put(
            out,
            Box::into_raw(Box::new(AcReport {
                report,
                program: p.clone(),
            })),
        )
    })
}

/// # Safety
/// `report` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ac_report_free(report: *mut AcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Number of ledger rows, including the initial one; 0 for null.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ac_report_n_records(report: *const AcReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.records.len())
}

/// Bias of `bit` after the last step.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_report_final_bias(
    report: *const AcReport,
    bit: usize,
    out: *mut f64,
) -> AcStatus {
    guard(|| {
        let r = deref(report, "report")?;
        let biases = r.report.final_biases();
        let b = *biases.get(bit).ok_or((
            AcStatus::BitOutOfRange,
            format!("bit {bit} out of range for {}", biases.len()),
        ))?;
        put(out, b)
    })
}

/// Total entropy after the last step, in bits.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_report_final_entropy(
    report: *const AcReport,
    out: *mut f64,
) -> AcStatus {
    guard(|| put(out, deref(report, "report")?.report.summary.final_entropy))
}

/// Final max bias minus `min(1, eps0 sqrt(n))`.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_report_bypass_margin(
    report: *const AcReport,
    out: *mut f64,
) -> AcStatus {
    guard(|| put(out, deref(report, "report")?.report.summary.bypass_margin))
}

/// Number of invariant violations recorded during the run.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ac_report_n_violations(report: *const AcReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.violations.len())
}

/// Ledger as CSV; free with [`ac_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_report_csv(report: *const AcReport, out: *mut *mut c_char) -> AcStatus {
    guard(|| {
        let csv = deref(report, "report")?.report.to_csv().ffi()?;
        put(out, c_string(csv))
    })
}

/// Summary and bound check as JSON; free with [`ac_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_report_summary_json(
    report: *const AcReport,
    out: *mut *mut c_char,
) -> AcStatus {
    guard(|| {
        let r = deref(report, "report")?;
        let verdict = check_shannon(&r.report, &r.program);
        let value = serde_json::json!({ "summary": r.report.summary, "shannon": verdict, "violations": r.report.violations });
        put(out, c_string(value.to_string()))
    })
}

// ---- state ----

/// Product of thermal bits. `roles` may be null, meaning all computation bits.
///
/// # Safety
/// `biases` (and `roles` if non-null) must point to `n_bits` elements.
#[no_mangle]
pub unsafe extern "C" fn ac_state_new_thermal(
    biases: *const f64,
    roles: *const AcRole,
    n_bits: usize,
    out: *mut *mut AcState,
) -> AcStatus {
    guard(|| {
        if biases.is_null() && n_bits > 0 {
            return Err(null("biases"));
        }
        let b = if n_bits == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(biases, n_bits)
        };
        let r: Vec<Role> = if roles.is_null() {
            vec![Role::Computation; n_bits]
        } else {
            std::slice::from_raw_parts(roles, n_bits)
                .iter()
                .map(|r| match r {
                    AcRole::Computation => Role::Computation,
                    AcRole::Reset => Role::Reset,
                })
                .collect()
        };
        let s = DiagonalState::new_thermal(b, &r).ffi()?;
        put(out, Box::into_raw(Box::new(AcState(s))))
    })
}

/// # Safety
/// `state` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ac_state_free(state: *mut AcState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ac_state_n_bits(state: *const AcState) -> usize {
    state.as_ref().map_or(0, |s| s.0.n_bits())
}

/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_state_bias(
    state: *const AcState,
    bit: usize,
    out: *mut f64,
) -> AcStatus {
    guard(|| {
        let b = deref(state, "state")?.0.marginal_bias(bit).ffi()?;
        put(out, b)
    })
}

/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_state_total_entropy(state: *const AcState, out: *mut f64) -> AcStatus {
    guard(|| put(out, deref(state, "state")?.0.total_entropy()))
}

/// Copies the `2^n` probabilities into `buf`, which holds `len` doubles.
///
/// # Safety
/// `state` must be a live handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ac_state_probabilities(
    state: *const AcState,
    buf: *mut f64,
    len: usize,
) -> AcStatus {
    guard(|| {
        let probs = deref(state, "state")?.0.probs();
        if len < probs.len() {
            return Err((
                AcStatus::InvalidArgument,
                format!("buffer holds {len}, need {}", probs.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(probs.as_ptr(), buf, probs.len());
        Ok(())
    })
}

/// Applies a reversible gate; `operands[0]` is the most significant input.
///
/// # Safety
/// `state` must be a live handle and `operands` must hold `n_operands` elements.
#[no_mangle]
pub unsafe extern "C" fn ac_state_apply_gate(
    state: *mut AcState,
    kind: AcGateKind,
    operands: *const usize,
    n_operands: usize,
) -> AcStatus {
    guard(|| {
        let s = deref_mut(state, "state")?;
        if operands.is_null() {
            return Err(null("operands"));
        }
        let ops = std::slice::from_raw_parts(operands, n_operands).to_vec();
        let gate = GateSpec::new(gate_kind(kind), ops).ffi()?;
        s.0.apply_gate(&gate).ffi()
    })
}

/// Replaces `bit` by a fresh thermal bit of bias `eps0`. Computation bits are
/// refused unless `allow_computation` is set.
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ac_state_reset(
    state: *mut AcState,
    bit: usize,
    eps0: f64,
    allow_computation: bool,
) -> AcStatus {
    guard(|| {
        deref_mut(state, "state")?
            .0
            .apply_reset(bit, eps0, allow_computation)
            .ffi()
    })
}

/// Relaxes every bit toward equilibrium for `duration`.
///
/// # Safety
/// `state` and `config` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ac_state_relax(
    state: *mut AcState,
    duration: f64,
    config: *const AcThermalConfig,
) -> AcStatus {
    guard(|| {
        let cfg = thermal(deref(config, "config")?)?;
        deref_mut(state, "state")?.0.relax(duration, &cfg).ffi()
    })
}

// ---- thermodynamics ----

/// `tanh(delta_e / 2T)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_bias_from_temperature(
    delta_e: f64,
    temperature: f64,
    out: *mut f64,
) -> AcStatus {
    guard(|| {
        put(
            out,
            thermo::bias_from_temperature(delta_e, temperature).ffi()?,
        )
    })
}

/// Spin temperature of a bias, for `0 < bias < 1`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_temperature_from_bias(
    delta_e: f64,
    bias: f64,
    out: *mut f64,
) -> AcStatus {
    guard(|| put(out, thermo::temperature_from_bias(delta_e, bias).ffi()?))
}

/// Shannon entropy of one bit, in bits.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ac_entropy_of_bias(bias: f64, out: *mut f64) -> AcStatus {
    guard(|| put(out, thermo::entropy_of_bias(bias).ffi()?))
}

/// `min(1, bias sqrt(n))`.
#[no_mangle]
pub extern "C" fn ac_shannon_bound_bias(n: u64, bias: f64) -> f64 {
    thermo::shannon_bound_bias(n, bias)
}

/// Cooled-bit bias after one three-bit compression of equal biases.
#[no_mangle]
pub extern "C" fn ac_predicted_comp3_bias(eps: f64) -> f64 {
    algocool::predicted_comp3_bias(eps)
}
