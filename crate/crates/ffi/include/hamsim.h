#ifndef HAMSIM_H
#define HAMSIM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success.
typedef enum HamsimStatus {
  HAMSIM_STATUS_OK = 0,
  HAMSIM_STATUS_NULL_POINTER = 1,
  HAMSIM_STATUS_INVALID_UTF8 = 2,
  HAMSIM_STATUS_INVALID_ARGUMENT = 3,
  HAMSIM_STATUS_DIMENSION = 4,
  HAMSIM_STATUS_CAPACITY = 5,
  HAMSIM_STATUS_DEGENERATE_INPUT = 6,
  HAMSIM_STATUS_PARSE = 7,
  HAMSIM_STATUS_CONFIG = 8,
  HAMSIM_STATUS_IO = 9,
  HAMSIM_STATUS_INFEASIBLE_SEGMENTATION = 10,
  // A physical precondition failed: non-CPTP channel, invalid state,
  // non-Hermitian observable and similar.
  HAMSIM_STATUS_PHYSICS = 11,
  HAMSIM_STATUS_OUT_OF_RANGE = 12,
  // A panic was caught at the boundary; the library state is unaffected.
  HAMSIM_STATUS_PANIC = 99,
} HamsimStatus;

typedef enum HamsimRegime {
  HAMSIM_REGIME_BELOW_CRITICAL = 0,
  HAMSIM_REGIME_CRITICAL = 1,
  HAMSIM_REGIME_ABOVE_CRITICAL = 2,
  HAMSIM_REGIME_OPTIMIZED = 3,
  HAMSIM_REGIME_SHALLOW = 4,
} HamsimRegime;

// Output encoding for [`hamsim_report_render`].
typedef enum HamsimFormat {
  HAMSIM_FORMAT_CSV = 0,
  HAMSIM_FORMAT_JSON = 1,
  HAMSIM_FORMAT_PLOTDATA = 2,
} HamsimFormat;

// Parsed and resolved experiment spec.
typedef struct HamsimExperiment HamsimExperiment;

// Parsed Hamiltonian.
typedef struct HamsimHamiltonian HamsimHamiltonian;

// Result table of a run, sweep, cost evaluation or validation.
typedef struct HamsimReport HamsimReport;

// Inputs to the PEC-mitigated Trotter cost model.
typedef struct HamsimTrotterCost {
  // Commutator prefactor of the order-k error term, including `t^{k+1}`.
  double alpha_k;
  uint32_t order;
  double num_terms;
  double gamma;
  double gamma_prime;
} HamsimTrotterCost;

// Cost-model output at one target accuracy.
typedef struct HamsimTrotterCostResult {
  double epsilon;
  double epsilon_b;
  double epsilon_c;
  double depth;
  double samples;
  double samples_gst;
  double ratio_gst;
  enum HamsimRegime regime;
} HamsimTrotterCostResult;

// Overrides for spec-driven runs. `has_seed == 0` keeps the spec's seed and
// `shots == 0` keeps the spec's shot count.
typedef struct HamsimRunOptions {
  int32_t has_seed;
  uint64_t seed;
  uintptr_t shots;
} HamsimRunOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *hamsim_version(void);

// Message for the most recent failure on this thread, or NULL. The pointer
// stays valid until the next library call on the same thread.
const char *hamsim_last_error(void);

// Releases a string returned by the library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void hamsim_string_free(char *s);

// Parses `<coefficient> <label>` lines.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` writable.
enum HamsimStatus hamsim_hamiltonian_parse(const char *text, struct HamsimHamiltonian **out);

// # Safety
// `h` must be NULL or a live handle from [`hamsim_hamiltonian_parse`].
void hamsim_hamiltonian_free(struct HamsimHamiltonian *h);

// Number of terms, or 0 for NULL.
//
// # Safety
// `h` must be NULL or a live handle.
uintptr_t hamsim_hamiltonian_num_terms(const struct HamsimHamiltonian *h);

// Qubit count, or 0 for NULL.
//
// # Safety
// `h` must be NULL or a live handle.
uintptr_t hamsim_hamiltonian_num_qubits(const struct HamsimHamiltonian *h);

// Sum of absolute coefficients.
//
// # Safety
// `h` must be a live handle and `out` writable.
enum HamsimStatus hamsim_hamiltonian_beta(const struct HamsimHamiltonian *h, double *out);

// Nested-commutator sum for product-formula order `order`.
//
// # Safety
// `h` must be a live handle and `out` writable.
enum HamsimStatus hamsim_hamiltonian_alpha_comm(const struct HamsimHamiltonian *h,
                                                uint32_t order,
                                                double *out);

// First-order prefactor; `exact != 0` uses dense norms, otherwise the
// triangle-inequality bound.
//
// # Safety
// `h` must be a live handle and `out` writable.
enum HamsimStatus hamsim_hamiltonian_c1(const struct HamsimHamiltonian *h,
                                        int32_t exact,
                                        double *out);

// Optimal depth and sample count of PEC-mitigated Trotter simulation at
// target accuracy `epsilon`.
//
// # Safety
// `inputs` must point to a valid struct and `out` be writable.
enum HamsimStatus hamsim_trotter_cost(const struct HamsimTrotterCost *inputs,
                                      double epsilon,
                                      struct HamsimTrotterCostResult *out);

// Loads a TOML spec; relative paths inside it resolve against its directory.
//
// # Safety
// `path` must be a valid NUL-terminated string and `out` writable.
enum HamsimStatus hamsim_experiment_load(const char *path, struct HamsimExperiment **out);

// Parses a TOML spec from memory. `base_dir` may be NULL for the current
// directory.
//
// # Safety
// `spec` must be a valid NUL-terminated string, `base_dir` NULL or valid,
// and `out` writable.
enum HamsimStatus hamsim_experiment_parse(const char *spec,
                                          const char *base_dir,
                                          struct HamsimExperiment **out);

// # Safety
// `e` must be NULL or a live experiment handle.
void hamsim_experiment_free(struct HamsimExperiment *e);

// One seeded simulation. `opts` may be NULL.
//
// # Safety
// `e` must be a live handle, `opts` NULL or valid, `out` writable.
enum HamsimStatus hamsim_simulate(const struct HamsimExperiment *e,
                                  const struct HamsimRunOptions *opts,
                                  struct HamsimReport **out);

// Cost model at the spec's `[cost] epsilon`. `opts` may be NULL.
//
// # Safety
// As for [`hamsim_simulate`].
enum HamsimStatus hamsim_cost(const struct HamsimExperiment *e,
                              const struct HamsimRunOptions *opts,
                              struct HamsimReport **out);

// The spec's `[sweep]`. `opts` may be NULL.
//
// # Safety
// As for [`hamsim_simulate`].
enum HamsimStatus hamsim_sweep(const struct HamsimExperiment *e,
                               const struct HamsimRunOptions *opts,
                               struct HamsimReport **out);

// Runs comma-separated validation suites (`all` for every suite).
// `shots == 0` keeps each suite's default.
//
// # Safety
// `suites` must be a valid NUL-terminated string and `out` writable.
enum HamsimStatus hamsim_validate(const char *suites,
                                  uint64_t seed,
                                  uintptr_t shots,
                                  struct HamsimReport **out);

// # Safety
// `r` must be NULL or a live report handle.
void hamsim_report_free(struct HamsimReport *r);

// 1 when every check passed, 0 otherwise, -1 for NULL.
//
// # Safety
// `r` must be NULL or a live handle.
int32_t hamsim_report_passed(const struct HamsimReport *r);

// Number of records, or 0 for NULL.
//
// # Safety
// `r` must be NULL or a live handle.
uintptr_t hamsim_report_num_records(const struct HamsimReport *r);

// Looks up column `key` of record `index`.
//
// # Safety
// `r` must be a live handle, `key` a valid string, `out` writable.
enum HamsimStatus hamsim_report_value(const struct HamsimReport *r,
                                      uintptr_t index,
                                      const char *key,
                                      double *out);

// Renders the report. The caller frees `*out` with [`hamsim_string_free`].
//
// # Safety
// `r` must be a live handle and `out` writable.
enum HamsimStatus hamsim_report_render(const struct HamsimReport *r,
                                       enum HamsimFormat format,
                                       char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HAMSIM_H */
