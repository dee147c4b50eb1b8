#ifndef LCDRIVE_H
#define LCDRIVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LcdBoundary {
  LCD_BOUNDARY_AUTO = 0,
  LCD_BOUNDARY_PERIODIC = 1,
  LCD_BOUNDARY_ANTIPERIODIC = 2,
} LcdBoundary;

typedef enum LcdKind {
  LCD_KIND_ADIABATIC = 0,
  LCD_KIND_LINEAR = 1,
  LCD_KIND_LCD = 2,
  LCD_KIND_LCDLU = 3,
} LcdKind;

typedef enum LcdStatus {
  LCD_STATUS_OK = 0,
  LCD_STATUS_NULL_POINTER = 1,
  /**
   * Bad argument, config, parse or range error.
   */
  LCD_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Valid request beyond supported limits.
   */
  LCD_STATUS_CAPABILITY = 3,
  /**
   * Eigensolver, integrator, optimizer or schedule failure.
   */
  LCD_STATUS_NUMERICAL = 4,
  LCD_STATUS_IO = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  LCD_STATUS_PANIC = 6,
} LcdStatus;

/**
 * Opaque gate list.
 */
typedef struct LcdCircuit LcdCircuit;

/**
 * Opaque Pauli-sum operator.
 */
typedef struct LcdPauliSum LcdPauliSum;

/**
 * Opaque protocol result.
 */
typedef struct LcdRunResult LcdRunResult;

/**
 * Protocol parameters. For `LCDLU` the final unitary is a uniform X
 * rotation by `lu_theta`.
 */
typedef struct LcdSpec {
  uint32_t sites;
  double h_zi;
  double h_xf;
  double j_f;
  double tau;
  double lambda_f;
  enum LcdKind kind;
  enum LcdBoundary boundary;
  double lu_theta;
  uint32_t sample_count;
  double tol;
} LcdSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *lcd_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lcd_version(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void lcd_string_free(char *s);

/**
 * Fills `out` with defaults for the given kind, size and final field.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum LcdStatus lcd_spec_default(enum LcdKind kind,
                                uint32_t sites,
                                double h_xf,
                                struct LcdSpec *out);

/**
 * `1/(4ν)` for the schedules of `spec`.
 *
 * # Safety
 * `spec` must point to a valid spec and `out` be valid for writes.
 */
enum LcdStatus lcd_theory_lambda_f(const struct LcdSpec *spec, double *out);

/**
 * Empty operator on `sites` qubits.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum LcdStatus lcd_pauli_sum_new(uint32_t sites, struct LcdPauliSum **out);

/**
 * Adds `coeff · P` where `pauli` spells the string, site 0 first (`"XZIY"`).
 *
 * # Safety
 * `h` must be a live handle and `pauli` a NUL-terminated string.
 */
enum LcdStatus lcd_pauli_sum_add_term(struct LcdPauliSum *h,
                                      const char *pauli,
                                      double coeff_re,
                                      double coeff_im);

/**
 * Instantaneous Hamiltonian `H(t)` of a protocol (drive term included).
 *
 * # Safety
 * `spec` must point to a valid spec and `out` be valid for writes.
 */
enum LcdStatus lcd_protocol_hamiltonian(const struct LcdSpec *spec,
                                        double t,
                                        struct LcdPauliSum **out);

/**
 * # Safety
 * `h` must be a live handle or NULL.
 */
size_t lcd_pauli_sum_num_terms(const struct LcdPauliSum *h);

/**
 * Lowest eigenvalue of a self-adjoint operator.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for writes.
 */
enum LcdStatus lcd_pauli_sum_ground_energy(const struct LcdPauliSum *h, double *out);

/**
 * # Safety
 * `h` must come from this library and not have been freed, or be NULL.
 */
void lcd_pauli_sum_free(struct LcdPauliSum *h);

/**
 * Evolves the protocol described by `spec`.
 *
 * # Safety
 * `spec` must point to a valid spec and `out` be valid for writes.
 */
enum LcdStatus lcd_run(const struct LcdSpec *spec, struct LcdRunResult **out);

/**
 * Scalar results of a run: final and pre-LU fidelity, final energy and the
 * ratio to the ground energy. Any output pointer may be NULL.
 *
 * # Safety
 * `r` must be a live handle; non-NULL outputs must be valid for writes.
 */
enum LcdStatus lcd_run_result_summary(const struct LcdRunResult *r,
                                      double *final_fidelity,
                                      double *pre_lu_fidelity,
                                      double *energy,
                                      double *energy_ratio);

/**
 * Number of trajectory samples.
 *
 * # Safety
 * `r` must be a live handle or NULL.
 */
size_t lcd_run_result_len(const struct LcdRunResult *r);

/**
 * Copies sample times and target fidelities into arrays of length `len`,
 * which must equal [`lcd_run_result_len`].
 *
 * # Safety
 * `times` and `fidelity` must each hold `len` doubles.
 */
enum LcdStatus lcd_run_result_trajectory(const struct LcdRunResult *r,
                                         double *times,
                                         double *fidelity,
                                         size_t len);

/**
 * Copies the final state as interleaved `(re, im)` pairs; `len` is the
 * number of doubles and must be `2·2^L`.
 *
 * # Safety
 * `buf` must hold `len` doubles.
 */
enum LcdStatus lcd_run_result_state(const struct LcdRunResult *r, double *buf, size_t len);

/**
 * # Safety
 * `r` must come from this library and not have been freed, or be NULL.
 */
void lcd_run_result_free(struct LcdRunResult *r);

/**
 * First-order Trotter circuit of `spec` with `steps` steps.
 *
 * # Safety
 * `spec` must point to a valid spec and `out` be valid for writes.
 */
enum LcdStatus lcd_circuit_synthesize(const struct LcdSpec *spec,
                                      uint32_t steps,
                                      struct LcdCircuit **out);

/**
 * Parses OpenQASM 2.0 text in the dialect written by [`lcd_circuit_to_qasm`].
 *
 * # Safety
 * `text` must be NUL-terminated and `out` valid for writes.
 */
enum LcdStatus lcd_circuit_from_qasm(const char *text, struct LcdCircuit **out);

/**
 * Single- and two-qubit gate counts; either output may be NULL.
 *
 * # Safety
 * `c` must be a live handle; non-NULL outputs must be valid for writes.
 */
enum LcdStatus lcd_circuit_gate_counts(const struct LcdCircuit *c, size_t *single, size_t *two);

/**
 * OpenQASM 2.0 text; free with [`lcd_string_free`].
 *
 * # Safety
 * `c` must be a live handle and `out` valid for writes.
 */
enum LcdStatus lcd_circuit_to_qasm(const struct LcdCircuit *c, char **out);

/**
 * Simulates the circuit from its own initial state, samples `shots` times
 * in the Z and X bases, and estimates `⟨J_f Σσᶻσᶻ + h_xf Σσˣ⟩`.
 *
 * # Safety
 * `c` must be a live handle; `energy` and `stderr_out` valid for writes.
 */
enum LcdStatus lcd_circuit_sample_energy(const struct LcdCircuit *c,
                                         double h_xf,
                                         double j_f,
                                         enum LcdBoundary boundary,
                                         uint64_t shots,
                                         uint64_t seed,
                                         double *energy,
                                         double *stderr_out);

/**
 * # Safety
 * `c` must come from this library and not have been freed, or be NULL.
 */
void lcd_circuit_free(struct LcdCircuit *c);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LCDRIVE_H */
