#ifndef STN_SIM_H
#define STN_SIM_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define STN_OK 0

#define STN_ERR_INVALID 1

#define STN_ERR_RUNTIME 2

/**
 * Simulation method selector.
 */
typedef enum StnMethod {
  STN_METHOD_MAST = 0,
  STN_METHOD_STN = 1,
} StnMethod;

/**
 * Projection schedule selector for the gadgetized method.
 */
typedef enum StnSchedule {
  STN_SCHEDULE_LEFT_TO_RIGHT = 0,
  STN_SCHEDULE_RIGHT_TO_LEFT = 1,
  STN_SCHEDULE_MIDDLE_OUT_PAIRWISE = 2,
} StnSchedule;

/**
 * Opaque circuit handle.
 */
typedef struct StnCircuit StnCircuit;

/**
 * Opaque run-result handle.
 */
typedef struct StnRunResult StnRunResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *stn_version(void);

/**
 * Message for the most recent error on this thread, or NULL. The returned
 * string must be released with `stn_string_free`.
 */
char *stn_last_error_message(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer returned by this library and not yet freed.
 */
void stn_string_free(char *s);

/**
 * Parse circuit text. On success writes a new handle to `out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be a valid pointer.
 */
int32_t stn_circuit_parse(const char *text, struct StnCircuit **out);

/**
 * Emit the canonical text form. Clifford blocks are synthesized first.
 *
 * # Safety
 * `circuit` must be a live handle; `out` must be a valid pointer.
 */
int32_t stn_circuit_emit(const struct StnCircuit *circuit, char **out);

/**
 * # Safety
 * `circuit` must be a live handle or NULL.
 */
void stn_circuit_free(struct StnCircuit *circuit);

/**
 * # Safety
 * `circuit` must be a live handle.
 */
uintptr_t stn_circuit_qubits(const struct StnCircuit *circuit);

/**
 * # Safety
 * `circuit` must be a live handle.
 */
uintptr_t stn_circuit_gate_count(const struct StnCircuit *circuit);

/**
 * # Safety
 * `circuit` must be a live handle.
 */
uintptr_t stn_circuit_non_clifford_count(const struct StnCircuit *circuit);

/**
 * Random T-doped Clifford circuit: t layers of a uniformly random n-qubit
 * Clifford followed by a T on qubit 0.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t stn_gen_t_doped(uintptr_t n, uintptr_t t, uint64_t seed, struct StnCircuit **out);

/**
 * Forward T-doped circuit followed by its exact inverse.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t stn_gen_uudagger(uintptr_t n, uintptr_t t, uint64_t seed, struct StnCircuit **out);

/**
 * Hidden bit shift circuit over n data qubits with `ccz` CCZ gates per
 * oracle; `use_four_t` selects the ancilla-based 4-T CCZ realization.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t stn_gen_hidden_shift(uintptr_t n,
                             uintptr_t ccz,
                             bool use_four_t,
                             uint64_t seed,
                             struct StnCircuit **out);

/**
 * Simulate a circuit. `chi_max` of 0 means unbounded; `cutoff` is the SVD
 * truncation threshold (1e-12 is the exact-mode default).
 *
 * # Safety
 * `circuit` must be a live handle; `out` must be a valid pointer.
 */
int32_t stn_run(const struct StnCircuit *circuit,
                enum StnMethod method,
                enum StnSchedule schedule,
                uint64_t seed,
                uintptr_t chi_max,
                double cutoff,
                struct StnRunResult **out);

/**
 * # Safety
 * `result` must be a live handle or NULL.
 */
void stn_result_free(struct StnRunResult *result);

/**
 * Peak bond dimension over the whole run, resolution included.
 *
 * # Safety
 * `result` must be a live handle.
 */
uintptr_t stn_result_peak_chi(const struct StnRunResult *result);

/**
 * # Safety
 * `result` must be a live handle.
 */
double stn_result_wall_ms(const struct StnRunResult *result);

/**
 * Number of measurement outcomes recorded by the run.
 *
 * # Safety
 * `result` must be a live handle.
 */
uintptr_t stn_result_outcome_count(const struct StnRunResult *result);

/**
 * Measurement outcome (0 or 1) at `index`, or -1 when out of range.
 *
 * # Safety
 * `result` must be a live handle.
 */
int32_t stn_result_outcome(const struct StnRunResult *result, uintptr_t index);

/**
 * Number of samples in the bond-dimension trace.
 *
 * # Safety
 * `result` must be a live handle.
 */
uintptr_t stn_result_trace_len(const struct StnRunResult *result);

/**
 * Read one (step, chi) sample of the bond trace.
 *
 * # Safety
 * `result` must be a live handle; `step` and `chi` must be valid pointers.
 */
int32_t stn_result_trace_sample(const struct StnRunResult *result,
                                uintptr_t index,
                                uint64_t *step,
                                uintptr_t *chi);

/**
 * Probability 2^{n-1}/(2^n - 1) that a random-Clifford stabilizer row has an
 * X component at a given position, conditioned on having one anywhere.
 */
double stn_x_probability(uintptr_t n);

/**
 * Expected peak bond dimension of the magic-register projection model.
 */
double stn_expected_chi_model(uintptr_t n, uintptr_t t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STN_SIM_H */
