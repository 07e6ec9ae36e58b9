//! C ABI over the simulator. Handles are opaque pointers owned by the
//! library; every fallible call returns a status code and leaves a message
//! retrievable with `stn_last_error_message`.
//!
//! Status codes: 0 success, 1 invalid argument or configuration, 2 runtime
//! failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use rand::SeedableRng;
use rand_pcg::Pcg64Mcg;

use stn_sim::bench::{expected_chi_model, x_probability_f64};
use stn_sim::circuits::{
    emit_circuit, gen_hidden_shift, gen_t_doped, gen_uudagger, parse_circuit, CczDecomposition,
    HiddenShiftSpec, TDopedSpec,
};
use stn_sim::mast::{run_mast, run_stn, ProjectionSchedule, RunResult};
use stn_sim::mps::TruncationPolicy;
use stn_sim::{Circuit, Error};

pub const STN_OK: i32 = 0;
pub const STN_ERR_INVALID: i32 = 1;
pub const STN_ERR_RUNTIME: i32 = 2;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn code_for(err: &Error) -> i32 {
    match err {
        Error::Io(_) => STN_ERR_RUNTIME,
        _ => STN_ERR_INVALID,
    }
}

fn fail(err: Error) -> i32 {
    let code = code_for(&err);
    set_error(&err.to_string());
    code
}

/// Opaque circuit handle.
pub struct StnCircuit(Circuit);

/// Opaque run-result handle.
pub struct StnRunResult(RunResult);

/// Simulation method selector.
#[repr(C)]
pub enum StnMethod {
    Mast = 0,
    Stn = 1,
}

/// Projection schedule selector for the gadgetized method.
#[repr(C)]
pub enum StnSchedule {
    LeftToRight = 0,
    RightToLeft = 1,
    MiddleOutPairwise = 2,
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn stn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent error on this thread, or NULL. The returned
/// string must be released with `stn_string_free`.
#[no_mangle]
pub extern "C" fn stn_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse circuit text. On success writes a new handle to `out`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stn_circuit_parse(
    text: *const c_char,
    out: *mut *mut StnCircuit,
) -> i32 {
    if text.is_null() || out.is_null() {
        set_error("null pointer argument");
        return STN_ERR_INVALID;
    }
    let text = match CStr::from_ptr(text).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("circuit text is not valid UTF-8");
            return STN_ERR_INVALID;
        }
    };
    match parse_circuit(text) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(StnCircuit(c)));
            STN_OK
        }
        Err(e) => fail(e),
    }
}

/// Emit the canonical text form. Clifford blocks are synthesized first.
///
/// # Safety
/// `circuit` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stn_circuit_emit(
    circuit: *const StnCircuit,
    out: *mut *mut c_char,
) -> i32 {
    if circuit.is_null() || out.is_null() {
        set_error("null pointer argument");
        return STN_ERR_INVALID;
    }
    let circuit = &(*circuit).0;
    let text = circuit
        .synthesize_blocks()
        .and_then(|c| emit_circuit(&c));
    match text {
        Ok(t) => {
            *out = CString::new(t).unwrap_or_default().into_raw();
            STN_OK
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `circuit` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn stn_circuit_free(circuit: *mut StnCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// # Safety
/// `circuit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stn_circuit_qubits(circuit: *const StnCircuit) -> usize {
    (*circuit).0.n
}

/// # Safety
/// `circuit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stn_circuit_gate_count(circuit: *const StnCircuit) -> usize {
    (*circuit).0.gates.len()
}

/// # Safety
/// `circuit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stn_circuit_non_clifford_count(circuit: *const StnCircuit) -> usize {
    (*circuit).0.count_non_clifford()
}

/// Random T-doped Clifford circuit: t layers of a uniformly random n-qubit
/// Clifford followed by a T on qubit 0.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stn_gen_t_doped(
    n: usize,
    t: usize,
    seed: u64,
    out: *mut *mut StnCircuit,
) -> i32 {
    if out.is_null() {
        set_error("null pointer argument");
        return STN_ERR_INVALID;
    }
    match gen_t_doped(&TDopedSpec { n, t, seed }) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(StnCircuit(c)));
            STN_OK
        }
        Err(e) => fail(e),
    }
}

/// Forward T-doped circuit followed by its exact inverse.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stn_gen_uudagger(
    n: usize,
    t: usize,
    seed: u64,
    out: *mut *mut StnCircuit,
) -> i32 {
    if out.is_null() {
        set_error("null pointer argument");
        return STN_ERR_INVALID;
    }
    match gen_uudagger(&TDopedSpec { n, t, seed }) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(StnCircuit(c)));
            STN_OK
        }
        Err(e) => fail(e),
    }
}

/// Hidden bit shift circuit over n data qubits with `ccz` CCZ gates per
/// oracle; `use_four_t` selects the ancilla-based 4-T CCZ realization.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stn_gen_hidden_shift(
    n: usize,
    ccz: usize,
    use_four_t: bool,
    seed: u64,
    out: *mut *mut StnCircuit,
) -> i32 {
    if out.is_null() {
        set_error("null pointer argument");
        return STN_ERR_INVALID;
    }
    let dec = if use_four_t {
        CczDecomposition::FourT
    } else {
        CczDecomposition::SevenT
    };
    match HiddenShiftSpec::random(n, ccz, dec, seed).and_then(|s| gen_hidden_shift(&s)) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(StnCircuit(c)));
            STN_OK
        }
        Err(e) => fail(e),
    }
}

/// Simulate a circuit. `chi_max` of 0 means unbounded; `cutoff` is the SVD
/// truncation threshold (1e-12 is the exact-mode default).
///
/// # Safety
/// `circuit` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stn_run(
    circuit: *const StnCircuit,
    method: StnMethod,
    schedule: StnSchedule,
    seed: u64,
    chi_max: usize,
    cutoff: f64,
    out: *mut *mut StnRunResult,
) -> i32 {
    if circuit.is_null() || out.is_null() {
        set_error("null pointer argument");
        return STN_ERR_INVALID;
    }
    let circuit = &(*circuit).0;
    let policy = TruncationPolicy {
        chi_max: if chi_max == 0 { None } else { Some(chi_max) },
        svd_cutoff: cutoff,
    };
    let schedule = match schedule {
        StnSchedule::LeftToRight => ProjectionSchedule::LeftToRight,
        StnSchedule::RightToLeft => ProjectionSchedule::RightToLeft,
        StnSchedule::MiddleOutPairwise => ProjectionSchedule::MiddleOutPairwise,
    };
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let result = match method {
        StnMethod::Mast => run_mast(circuit, &schedule, policy, &mut rng),
        StnMethod::Stn => run_stn(circuit, policy, &mut rng),
    };
    match result {
        Ok(r) => {
            *out = Box::into_raw(Box::new(StnRunResult(r)));
            STN_OK
        }
        Err(e) => {
            let code = match e {
                Error::InvalidConfig(_) | Error::Parse { .. } => STN_ERR_INVALID,
                _ => STN_ERR_RUNTIME,
            };
            set_error(&e.to_string());
            code
        }
    }
}

/// # Safety
/// `result` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn stn_result_free(result: *mut StnRunResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Peak bond dimension over the whole run, resolution included.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stn_result_peak_chi(result: *const StnRunResult) -> usize {
    (*result).0.peak_chi
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stn_result_wall_ms(result: *const StnRunResult) -> f64 {
    (*result).0.wall_ms
}

/// Number of measurement outcomes recorded by the run.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stn_result_outcome_count(result: *const StnRunResult) -> usize {
    (*result).0.outcomes.len()
}

/// Measurement outcome (0 or 1) at `index`, or -1 when out of range.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stn_result_outcome(result: *const StnRunResult, index: usize) -> i32 {
    let run = &(*result).0;
    match run.outcomes.get(index) {
        Some(&v) => i32::from(v),
        None => -1,
    }
}

/// Number of samples in the bond-dimension trace.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stn_result_trace_len(result: *const StnRunResult) -> usize {
    let run = &(*result).0;
    run.trace.samples().len()
}

/// Read one (step, chi) sample of the bond trace.
///
/// # Safety
/// `result` must be a live handle; `step` and `chi` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn stn_result_trace_sample(
    result: *const StnRunResult,
    index: usize,
    step: *mut u64,
    chi: *mut usize,
) -> i32 {
    let run = &(*result).0;
    match run.trace.samples().get(index) {
        Some(&(s, c)) => {
            if !step.is_null() {
                *step = s;
            }
            if !chi.is_null() {
                *chi = c;
            }
            STN_OK
        }
        None => {
            set_error("trace index out of range");
            STN_ERR_INVALID
        }
    }
}

/// Probability 2^{n-1}/(2^n - 1) that a random-Clifford stabilizer row has an
/// X component at a given position, conditioned on having one anywhere.
#[no_mangle]
pub extern "C" fn stn_x_probability(n: usize) -> f64 {
    x_probability_f64(n)
}

/// Expected peak bond dimension of the magic-register projection model.
#[no_mangle]
pub extern "C" fn stn_expected_chi_model(n: usize, t: usize) -> f64 {
    expected_chi_model(n, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    unsafe fn parse(text: &str) -> *mut StnCircuit {
        let c_text = CString::new(text).unwrap();
        let mut out: *mut StnCircuit = ptr::null_mut();
        assert_eq!(stn_circuit_parse(c_text.as_ptr(), &mut out), STN_OK);
        assert!(!out.is_null());
        out
    }

    #[test]
    fn parse_run_and_free_through_the_abi() {
        unsafe {
            let circuit = parse("qubits 2\nh 0\ncx 0 1\nt 1\nmeasure0 0\n");
            assert_eq!(stn_circuit_qubits(circuit), 2);
            assert_eq!(stn_circuit_gate_count(circuit), 4);
            assert_eq!(stn_circuit_non_clifford_count(circuit), 1);

            let mut result: *mut StnRunResult = ptr::null_mut();
            let code = stn_run(
                circuit,
                StnMethod::Mast,
                StnSchedule::LeftToRight,
                7,
                0,
                1e-12,
                &mut result,
            );
            assert_eq!(code, STN_OK);
            assert!(stn_result_peak_chi(result) >= 1);
            assert_eq!(stn_result_outcome_count(result), 1);
            let v = stn_result_outcome(result, 0);
            assert_eq!(v, 0); // forced |0> branch
            assert_eq!(stn_result_outcome(result, 5), -1);
            let len = stn_result_trace_len(result);
            if len > 0 {
                let (mut s, mut chi) = (0u64, 0usize);
                assert_eq!(stn_result_trace_sample(result, 0, &mut s, &mut chi), STN_OK);
                assert!(chi >= 1);
            }
            stn_result_free(result);
            stn_circuit_free(circuit);
        }
    }

    #[test]
    fn error_paths_set_messages() {
        unsafe {
            let bad = CString::new("qubits 2\nfoo 0\n").unwrap();
            let mut out: *mut StnCircuit = ptr::null_mut();
            assert_eq!(stn_circuit_parse(bad.as_ptr(), &mut out), STN_ERR_INVALID);
            let msg = stn_last_error_message();
            assert!(!msg.is_null());
            let text = CStr::from_ptr(msg).to_string_lossy().to_string();
            assert!(text.contains("foo"), "{text}");
            stn_string_free(msg);
            // null argument
            assert_eq!(
                stn_circuit_parse(ptr::null(), &mut out),
                STN_ERR_INVALID
            );
        }
    }

    #[test]
    fn generators_and_emit_round_trip() {
        unsafe {
            let mut circuit: *mut StnCircuit = ptr::null_mut();
            assert_eq!(stn_gen_t_doped(4, 3, 11, &mut circuit), STN_OK);
            assert_eq!(stn_circuit_qubits(circuit), 4);
            let mut text: *mut c_char = ptr::null_mut();
            assert_eq!(stn_circuit_emit(circuit, &mut text), STN_OK);
            let emitted = CStr::from_ptr(text).to_string_lossy().to_string();
            assert!(emitted.starts_with("qubits 4\n"));
            // the emitted text parses back
            let reparsed = parse(&emitted);
            assert_eq!(stn_circuit_non_clifford_count(reparsed), 3);
            stn_circuit_free(reparsed);
            stn_string_free(text);
            stn_circuit_free(circuit);

            let mut hs: *mut StnCircuit = ptr::null_mut();
            assert_eq!(stn_gen_hidden_shift(8, 1, false, 3, &mut hs), STN_OK);
            assert_eq!(stn_circuit_non_clifford_count(hs), 14);
            stn_circuit_free(hs);
            // odd n is invalid
            assert_eq!(stn_gen_hidden_shift(7, 0, false, 3, &mut hs), STN_ERR_INVALID);
        }
    }

    #[test]
    fn formulas_through_the_abi() {
        assert!((stn_x_probability(1) - 1.0).abs() < 1e-12);
        assert!((stn_x_probability(2) - 2.0 / 3.0).abs() < 1e-12);
        assert!((stn_expected_chi_model(20, 0) - 1.0).abs() < 1e-12);
        let v = stn_expected_chi_model(20, 5);
        assert!((2.0..2.1).contains(&v));
    }
}
