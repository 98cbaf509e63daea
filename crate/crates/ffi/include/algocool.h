#ifndef ALGOCOOL_H
#define ALGOCOOL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum AcStatus {
  AC_STATUS_OK = 0,
  AC_STATUS_NULL_POINTER = 1,
  AC_STATUS_INVALID_ARGUMENT = 2,
  AC_STATUS_BIT_OUT_OF_RANGE = 3,
  AC_STATUS_CAP_EXCEEDED = 4,
  AC_STATUS_POLICY = 5,
  AC_STATUS_PARSE = 6,
  AC_STATUS_IO = 7,
  AC_STATUS_INTERNAL = 8,
  AC_STATUS_PANIC = 9,
} AcStatus;

typedef enum AcMode {
  AC_MODE_IDEAL = 0,
  AC_MODE_FINITE = 1,
} AcMode;

typedef enum AcRole {
  AC_ROLE_COMPUTATION = 0,
  AC_ROLE_RESET = 1,
} AcRole;

typedef enum AcGateKind {
  AC_GATE_KIND_CNOT = 0,
  AC_GATE_KIND_CSWAP_VARIANT = 1,
  AC_GATE_KIND_COMP3_TWO_GATE = 2,
  AC_GATE_KIND_COMP3_PERM = 3,
  AC_GATE_KIND_SWAP = 4,
} AcGateKind;

/**
 * Compiled program.
 */
typedef struct AcProgram AcProgram;

/**
 * Result of executing a program.
 */
typedef struct AcReport AcReport;

/**
 * Full probability distribution over a register.
 */
typedef struct AcState AcState;

/**
 * Thermal parameters. A NaN relaxation time means "unset": computation bits
 * then never relax and reset bits rethermalize instantly.
 */
typedef struct AcThermalConfig {
  double eps0;
  double t1_comp;
  double t1_reset;
  double compute_duration;
  double reset_duration;
} AcThermalConfig;

typedef struct AcCost {
  uint64_t compute_steps;
  uint64_t reset_steps;
  uint64_t total_time_steps;
} AcCost;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread; do not free.
 */
const char *ac_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ac_string_free(char *s);

/**
 * Ideal-mode parameters for the given bath bias.
 */
struct AcThermalConfig ac_thermal_config_ideal(double eps0);

/**
 * Compiles PAC1 cooling `m` bits to level `j_f`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AcStatus ac_program_compile_pac1(uint32_t j_f,
                                      size_t m,
                                      bool two_gate,
                                      struct AcProgram **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum AcStatus ac_program_compile_pac2(uint32_t j_f, bool two_gate, struct AcProgram **out);

/**
 * The six-bit compress, swap, reset demonstration cycle.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AcStatus ac_program_compile_demo(bool two_gate, struct AcProgram **out);

/**
 * Parses a program from its JSON-lines text.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum AcStatus ac_program_from_jsonl(const char *text, struct AcProgram **out);

/**
 * # Safety
 * `program` must come from this library (or be null) and not be used afterwards.
 */
void ac_program_free(struct AcProgram *program);

/**
 * Register width, or 0 for a null handle.
 *
 * # Safety
 * `program` must be a live handle or null.
 */
size_t ac_program_n_bits(const struct AcProgram *program);

/**
 * # Safety
 * `program` must be a live handle and `out` a valid pointer.
 */
enum AcStatus ac_program_cost(const struct AcProgram *program, struct AcCost *out);

/**
 * First target bit.
 *
 * # Safety
 * `program` must be a live handle and `out` a valid pointer.
 */
enum AcStatus ac_program_target(const struct AcProgram *program, size_t *out);

/**
 * JSON-lines serialization; free with [`ac_string_free`].
 *
 * # Safety
 * `program` must be a live handle and `out` a valid pointer.
 */
enum AcStatus ac_program_to_jsonl(const struct AcProgram *program, char **out);

/**
 * Human-readable listing; free with [`ac_string_free`].
 *
 * # Safety
 * `program` must be a live handle and `out` a valid pointer.
 */
enum AcStatus ac_program_disassemble(const struct AcProgram *program, char **out);

/**
 * Executes `program` on the exact distribution.
 *
 * # Safety
 * `program` and `config` must be valid and `out` a valid pointer.
 */
enum AcStatus ac_run(const struct AcProgram *program,
                     const struct AcThermalConfig *config,
                     enum AcMode mode,
                     struct AcReport **out);

/**
 * # Safety
 * `report` must come from this library (or be null) and not be used afterwards.
 */
void ac_report_free(struct AcReport *report);

/**
 * Number of ledger rows, including the initial one; 0 for null.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
size_t ac_report_n_records(const struct AcReport *report);

/**
 * Bias of `bit` after the last step.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum AcStatus ac_report_final_bias(const struct AcReport *report, size_t bit, double *out);

/**
 * Total entropy after the last step, in bits.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum AcStatus ac_report_final_entropy(const struct AcReport *report, double *out);

/**
 * Final max bias minus `min(1, eps0 sqrt(n))`.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum AcStatus ac_report_bypass_margin(const struct AcReport *report, double *out);

/**
 * Number of invariant violations recorded during the run.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
size_t ac_report_n_violations(const struct AcReport *report);

/**
 * Ledger as CSV; free with [`ac_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum AcStatus ac_report_csv(const struct AcReport *report, char **out);

/**
 * Summary and bound check as JSON; free with [`ac_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum AcStatus ac_report_summary_json(const struct AcReport *report, char **out);

/**
 * Product of thermal bits. `roles` may be null, meaning all computation bits.
 *
 * # Safety
 * `biases` (and `roles` if non-null) must point to `n_bits` elements.
 */
enum AcStatus ac_state_new_thermal(const double *biases,
                                   const enum AcRole *roles,
                                   size_t n_bits,
                                   struct AcState **out);

/**
 * # Safety
 * `state` must come from this library (or be null) and not be used afterwards.
 */
void ac_state_free(struct AcState *state);

/**
 * # Safety
 * `state` must be a live handle or null.
 */
size_t ac_state_n_bits(const struct AcState *state);

/**
 * # Safety
 * `state` must be a live handle and `out` a valid pointer.
 */
enum AcStatus ac_state_bias(const struct AcState *state, size_t bit, double *out);

/**
 * # Safety
 * `state` must be a live handle and `out` a valid pointer.
 */
enum AcStatus ac_state_total_entropy(const struct AcState *state, double *out);

/**
 * Copies the `2^n` probabilities into `buf`, which holds `len` doubles.
 *
 * # Safety
 * `state` must be a live handle and `buf` must hold `len` doubles.
 */
enum AcStatus ac_state_probabilities(const struct AcState *state, double *buf, size_t len);

/**
 * Applies a reversible gate; `operands[0]` is the most significant input.
 *
 * # Safety
 * `state` must be a live handle and `operands` must hold `n_operands` elements.
 */
enum AcStatus ac_state_apply_gate(struct AcState *state,
                                  enum AcGateKind kind,
                                  const size_t *operands,
                                  size_t n_operands);

/**
 * Replaces `bit` by a fresh thermal bit of bias `eps0`. Computation bits are
 * refused unless `allow_computation` is set.
 *
 * # Safety
 * `state` must be a live handle.
 */
enum AcStatus ac_state_reset(struct AcState *state,
                             size_t bit,
                             double eps0,
                             bool allow_computation);

/**
 * Relaxes every bit toward equilibrium for `duration`.
 *
 * # Safety
 * `state` and `config` must be valid.
 */
enum AcStatus ac_state_relax(struct AcState *state,
                             double duration,
                             const struct AcThermalConfig *config);

/**
 * `tanh(delta_e / 2T)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AcStatus ac_bias_from_temperature(double delta_e, double temperature, double *out);

/**
 * Spin temperature of a bias, for `0 < bias < 1`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AcStatus ac_temperature_from_bias(double delta_e, double bias, double *out);

/**
 * Shannon entropy of one bit, in bits.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AcStatus ac_entropy_of_bias(double bias, double *out);

/**
 * `min(1, bias sqrt(n))`.
 */
double ac_shannon_bound_bias(uint64_t n, double bias);

/**
 * Cooled-bit bias after one three-bit compression of equal biases.
 */
double ac_predicted_comp3_bias(double eps);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALGOCOOL_H */
