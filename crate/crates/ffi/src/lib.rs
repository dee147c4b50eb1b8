//! C ABI over `lcdrive`.
//!
//! Every fallible function returns an [`LcdStatus`]; on failure the message is
//! available from [`lcd_last_error_message`] on the same thread. Objects are
//! opaque handles created by `*_new`/`*_run`/`*_synthesize` and released with
//! the matching `*_free`. Strings returned by the library are freed with
//! [`lcd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lcdrive::engine::ground_state;
use lcdrive::pauli::{PauliString, PauliSum};
use lcdrive::protocols::{self, LocalUnitary, ProtocolKind, ProtocolSpec, RunResult};
use lcdrive::schedules::Boundary;
use lcdrive::trotter::{self, Circuit};
use lcdrive::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcdStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad argument, config, parse or range error.
    InvalidArgument = 2,
    /// Valid request beyond supported limits.
    Capability = 3,
    /// Eigensolver, integrator, optimizer or schedule failure.
    Numerical = 4,
    Io = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcdKind {
    Adiabatic = 0,
    Linear = 1,
    Lcd = 2,
    Lcdlu = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcdBoundary {
    Auto = 0,
    Periodic = 1,
    Antiperiodic = 2,
}

/// Protocol parameters. For `LCDLU` the final unitary is a uniform X
/// rotation by `lu_theta`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct LcdSpec {
    pub sites: u32,
    pub h_zi: f64,
    pub h_xf: f64,
    pub j_f: f64,
    pub tau: f64,
    pub lambda_f: f64,
    pub kind: LcdKind,
    pub boundary: LcdBoundary,
    pub lu_theta: f64,
    pub sample_count: u32,
    pub tol: f64,
}

/// Opaque Pauli-sum operator.
pub struct LcdPauliSum(PauliSum);
/// Opaque protocol result.
pub struct LcdRunResult(RunResult);
/// Opaque gate list.
pub struct LcdCircuit(Circuit);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LcdStatus {
    match e {
        Error::Usage(_) | Error::Config(_) | Error::Parse(_) | Error::Range { .. } => LcdStatus::InvalidArgument,
        Error::Capability(_) => LcdStatus::Capability,
        Error::Io(_) | Error::Json(_) => LcdStatus::Io,
        _ => LcdStatus::Numerical,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (LcdStatus, String)>) -> LcdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LcdStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            LcdStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (LcdStatus, String)>;
}

impl<T> IntoFfi<T> for lcdrive::Result<T> {
    fn ffi(self) -> Result<T, (LcdStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (LcdStatus, String) {
    (LcdStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (LcdStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (LcdStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (LcdStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (LcdStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

impl From<LcdKind> for ProtocolKind {
    fn from(k: LcdKind) -> Self {
        match k {
            LcdKind::Adiabatic => ProtocolKind::Adiabatic,
            LcdKind::Linear => ProtocolKind::Linear,
            LcdKind::Lcd => ProtocolKind::Lcd,
            LcdKind::Lcdlu => ProtocolKind::Lcdlu,
        }
    }
}

impl From<LcdBoundary> for Boundary {
    fn from(b: LcdBoundary) -> Self {
        match b {
            LcdBoundary::Auto => Boundary::Auto,
            LcdBoundary::Periodic => Boundary::Periodic,
            LcdBoundary::Antiperiodic => Boundary::Antiperiodic,
        }
    }
}

impl LcdSpec {
    fn to_spec(self) -> ProtocolSpec {
        let kind: ProtocolKind = self.kind.into();
        ProtocolSpec {
            sites: self.sites as usize,
            h_zi: self.h_zi,
            h_xf: self.h_xf,
            j_f: self.j_f,
            tau: self.tau,
            boundary: self.boundary.into(),
            kind,
            lambda_f: self.lambda_f,
            lu: (kind == ProtocolKind::Lcdlu).then(|| LocalUnitary::x_rotation(self.lu_theta)),
            sample_count: self.sample_count as usize,
            tol: self.tol,
            track_instantaneous: false,
        }
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lcd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lcd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lcd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Fills `out` with defaults for the given kind, size and final field.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcd_spec_default(kind: LcdKind, sites: u32, h_xf: f64, out: *mut LcdSpec) -> LcdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let d = ProtocolSpec::new(sites as usize, h_xf, kind.into());
        *out = LcdSpec {
            sites,
            h_zi: d.h_zi,
            h_xf,
            j_f: d.j_f,
            tau: d.tau,
            lambda_f: d.lambda_f,
            kind,
            boundary: LcdBoundary::Auto,
            lu_theta: std::f64::consts::FRAC_PI_4,
            sample_count: d.sample_count as u32,
            tol: d.tol,
        };
        Ok(())
    })
}

/// `1/(4ν)` for the schedules of `spec`.
///
/// # Safety
/// `spec` must point to a valid spec and `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcd_theory_lambda_f(spec: *const LcdSpec, out: *mut f64) -> LcdStatus {
    guard(|| {
        let s = deref(spec, "spec")?.to_spec();
        *out_ptr(out, "out")? = s.theory_lambda_f().ffi()?;
        Ok(())
    })
}

/// Empty operator on `sites` qubits.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcd_pauli_sum_new(sites: u32, out: *mut *mut LcdPauliSum) -> LcdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let h = PauliSum::zero(sites as usize).ffi()?;
        *out = Box::into_raw(Box::new(LcdPauliSum(h)));
        Ok(())
    })
}

/// Adds `coeff · P` where `pauli` spells the string, site 0 first (`"XZIY"`).
///
/// # Safety
/// `h` must be a live handle and `pauli` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lcd_pauli_sum_add_term(h: *mut LcdPauliSum, pauli: *const c_char, coeff_re: f64, coeff_im: f64) -> LcdStatus {
    guard(|| {
        let h = out_ptr(h, "operator")?;
        let s: PauliString = c_str(pauli, "pauli")?.parse().ffi()?;
        h.0.add_term(s, lcdrive::Complex64::new(coeff_re, coeff_im)).ffi()?;
        Ok(())
    })
}

/// Instantaneous Hamiltonian `H(t)` of a protocol (drive term included).
///
/// # Safety
/// `spec` must point to a valid spec and `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcd_protocol_hamiltonian(spec: *const LcdSpec, t: f64, out: *mut *mut LcdPauliSum) -> LcdStatus {
    guard(|| {
        let s = deref(spec, "spec")?.to_spec();
        let out = out_ptr(out, "out")?;
        let h = protocols::build_hamiltonian(&s, t).ffi()?;
        *out = Box::into_raw(Box::new(LcdPauliSum(h)));
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn lcd_pauli_sum_num_terms(h: *const LcdPauliSum) -> usize {
    h.as_ref().map_or(0, |h| h.0.num_terms())
}

/// Lowest eigenvalue of a self-adjoint operator.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcd_pauli_sum_ground_energy(h: *const LcdPauliSum, out: *mut f64) -> LcdStatus {
    guard(|| {
        let h = deref(h, "operator")?;
        *out_ptr(out, "out")? = ground_state(&h.0).ffi()?.energy;
        Ok(())
    })
}

/// # Safety
/// `h` must come from this library and not have been freed, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn lcd_pauli_sum_free(h: *mut LcdPauliSum) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Evolves the protocol described by `spec`.
///
/// # Safety
/// `spec` must point to a valid spec and `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcd_run(spec: *const LcdSpec, out: *mut *mut LcdRunResult) -> LcdStatus {
    guard(|| {
        let s = deref(spec, "spec")?.to_spec();
        let out = out_ptr(out, "out")?;
        let r = protocols::run(&s).ffi()?;
        *out = Box::into_raw(Box::new(LcdRunResult(r)));
        Ok(())
    })
}

/// Scalar results of a run: final and pre-LU fidelity, final energy and the
/// ratio to the ground energy. Any output pointer may be NULL.
///
/// # Safety
/// `r` must be a live handle; non-NULL outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcd_run_result_summary(
    r: *const LcdRunResult,
    final_fidelity: *mut f64,
    pre_lu_fidelity: *mut f64,
    energy: *mut f64,
    energy_ratio: *mut f64,
) -> LcdStatus {
    guard(|| {
        let r = &deref(r, "result")?.0;
        for (p, v) in [
            (final_fidelity, r.final_fidelity),
            (pre_lu_fidelity, r.pre_lu_fidelity),
            (energy, r.final_energy),
            (energy_ratio, r.energy_ratio),
        ] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Number of trajectory samples.
///
/// # Safety
/// `r` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn lcd_run_result_len(r: *const LcdRunResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.times.len())
}

/// Copies sample times and target fidelities into arrays of length `len`,
/// which must equal [`lcd_run_result_len`].
///
/// # Safety
/// `times` and `fidelity` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lcd_run_result_trajectory(r: *const LcdRunResult, times: *mut f64, fidelity: *mut f64, len: usize) -> LcdStatus {
    guard(|| {
        let r = &deref(r, "result")?.0;
        if len != r.times.len() {
            return Err((LcdStatus::InvalidArgument, format!("buffer length {len}, trajectory has {}", r.times.len())));
        }
        if times.is_null() || fidelity.is_null() {
            return Err(null("output buffer"));
        }
        ptr::copy_nonoverlapping(r.times.as_ptr(), times, len);
        ptr::copy_nonoverlapping(r.target_fidelity.as_ptr(), fidelity, len);
        Ok(())
    })
}

/// Copies the final state as interleaved `(re, im)` pairs; `len` is the
/// number of doubles and must be `2·2^L`.
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lcd_run_result_state(r: *const LcdRunResult, buf: *mut f64, len: usize) -> LcdStatus {
    guard(|| {
        let amps = deref(r, "result")?.0.final_state.amplitudes();
        if len != 2 * amps.len() {
            return Err((LcdStatus::InvalidArgument, format!("buffer length {len}, state needs {}", 2 * amps.len())));
        }
        let out = std::slice::from_raw_parts_mut(out_ptr(buf, "buffer")?, len);
        for (i, a) in amps.iter().enumerate() {
            out[2 * i] = a.re;
            out[2 * i + 1] = a.im;
        }
        Ok(())
    })
}

/// # Safety
/// `r` must come from this library and not have been freed, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn lcd_run_result_free(r: *mut LcdRunResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// First-order Trotter circuit of `spec` with `steps` steps.
///
/// # Safety
/// `spec` must point to a valid spec and `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcd_circuit_synthesize(spec: *const LcdSpec, steps: u32, out: *mut *mut LcdCircuit) -> LcdStatus {
    guard(|| {
        let s = deref(spec, "spec")?.to_spec();
        let out = out_ptr(out, "out")?;
        let c = trotter::synthesize(&s, steps as usize).ffi()?;
        *out = Box::into_raw(Box::new(LcdCircuit(c)));
        Ok(())
    })
}

/// Parses OpenQASM 2.0 text in the dialect written by [`lcd_circuit_to_qasm`].
///
/// # Safety
/// `text` must be NUL-terminated and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcd_circuit_from_qasm(text: *const c_char, out: *mut *mut LcdCircuit) -> LcdStatus {
    guard(|| {
        let t = c_str(text, "text")?;
        let out = out_ptr(out, "out")?;
        let c = trotter::parse_qasm(t).ffi()?;
        *out = Box::into_raw(Box::new(LcdCircuit(c)));
        Ok(())
    })
}

/// Single- and two-qubit gate counts; either output may be NULL.
///
/// # Safety
/// `c` must be a live handle; non-NULL outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcd_circuit_gate_counts(c: *const LcdCircuit, single: *mut usize, two: *mut usize) -> LcdStatus {
    guard(|| {
        let c = &deref(c, "circuit")?.0;
        if let Some(p) = single.as_mut() {
            *p = c.single_qubit_count();
        }
        if let Some(p) = two.as_mut() {
            *p = c.two_qubit_count();
        }
        Ok(())
    })
}

/// OpenQASM 2.0 text; free with [`lcd_string_free`].
///
/// # Safety
/// `c` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcd_circuit_to_qasm(c: *const LcdCircuit, out: *mut *mut c_char) -> LcdStatus {
    guard(|| {
        let c = &deref(c, "circuit")?.0;
        let out = out_ptr(out, "out")?;
        let s = CString::new(trotter::to_qasm(c)).map_err(|e| (LcdStatus::Io, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// Simulates the circuit from its own initial state, samples `shots` times
/// in the Z and X bases, and estimates `⟨J_f Σσᶻσᶻ + h_xf Σσˣ⟩`.
///
/// # Safety
/// `c` must be a live handle; `energy` and `stderr_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcd_circuit_sample_energy(
    c: *const LcdCircuit,
    h_xf: f64,
    j_f: f64,
    boundary: LcdBoundary,
    shots: u64,
    seed: u64,
    energy: *mut f64,
    stderr_out: *mut f64,
) -> LcdStatus {
    guard(|| {
        let c = &deref(c, "circuit")?.0;
        let energy = out_ptr(energy, "energy")?;
        let se = out_ptr(stderr_out, "stderr")?;
        let psi = c.prepare().ffi()?;
        let z = trotter::sample(&psi, trotter::Basis::Z, shots, seed).ffi()?;
        let x = trotter::sample(&psi, trotter::Basis::X, shots, seed.wrapping_add(1)).ffi()?;
        let e = trotter::estimate_energy(&z, &x, h_xf, j_f, boundary.into()).ffi()?;
        *energy = e.energy;
        *se = e.stderr;
        Ok(())
    })
}

/// # Safety
/// `c` must come from this library and not have been freed, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn lcd_circuit_free(c: *mut LcdCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}
