#ifndef SINGLECOPY_H
#define SINGLECOPY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_NULL_POINTER = 1,
  SC_STATUS_INVALID_ARGUMENT = 2,
  SC_STATUS_CONFIG = 3,
  SC_STATUS_IO = 4,
  SC_STATUS_SIMULATION = 5,
  SC_STATUS_PANIC = 6,
} ScStatus;

typedef enum ScScheme {
  SC_SCHEME_SINGLET = 0,
  SC_SCHEME_LCS = 1,
} ScScheme;

typedef enum ScFormat {
  SC_FORMAT_JSON_LINES = 0,
  SC_FORMAT_CSV = 1,
} ScFormat;

// Finished campaign: records and summary.
typedef struct ScCampaign ScCampaign;

// Stabilizer state with its own random stream for measurements.
typedef struct ScTableau ScTableau;

typedef struct ScSummary {
  uint64_t trials;
  uint64_t successes;
  double frequency;
  double wilson_low;
  double wilson_high;
  double pooled_delta_hat;
  // Margin the certificate was computed at.
  double delta;
  double bound;
  double confidence;
} ScSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *sc_last_error(void);

// # Safety
// `out` must be valid for writing one `double`.
enum ScStatus sc_kl_divergence(double x, double y, double *out);

// # Safety
// `out` must be valid for writing one `double`.
enum ScStatus sc_chernoff_bound(double delta, size_t k, double p, double *out);

// # Safety
// `out` must be valid for writing one `double`.
enum ScStatus sc_mcdiarmid_constants(size_t m_settings, size_t locality, double h_max, double *out);

// # Safety
// `out` must be valid for writing one `double`.
enum ScStatus sc_mcdiarmid_bound(size_t n, double delta, double kappa2, double *out);

// # Safety
// `out` must be valid for writing one `double`.
enum ScStatus sc_ground_state_bound(size_t n, double g_e, double delta, double beta2, double *out);

// # Safety
// `out` must be valid for writing one `double`.
enum ScStatus sc_expected_copies(double p0, double lambda, double *out);

// Number of regular partitions; fails if it does not fit in 64 bits.
//
// # Safety
// `out` must be valid for writing one `uint64_t`.
enum ScStatus sc_count_regular(size_t n, size_t l, uint64_t *out);

// Run a singlet (`n` pairs, `l` ignored) or cluster (`n` qubits, `l`
// clusters) campaign. `state` takes the CLI forms (`target`,
// `product:<labels>`, `product:oracle`, `noisy:<lambda>`); a NaN `delta`
// selects the post-hoc margin; `threads = 0` uses the default pool.
//
// # Safety
// `state` must be a NUL-terminated string and `out` valid for writing a pointer.
enum ScStatus sc_campaign_run(enum ScScheme scheme,
                              size_t n,
                              size_t l,
                              size_t trials,
                              uint64_t seed,
                              const char *state,
                              double delta,
                              size_t threads,
                              struct ScCampaign **out);

// Hamiltonian-scheme campaign; `hamiltonian_json` is the Hamiltonian file
// contents. Other arguments as in [`sc_campaign_run`].
//
// # Safety
// String arguments must be NUL-terminated and `out` valid for writing a pointer.
enum ScStatus sc_campaign_run_hamiltonian(const char *hamiltonian_json,
                                          size_t restarts,
                                          size_t trials,
                                          uint64_t seed,
                                          const char *state,
                                          double delta,
                                          size_t threads,
                                          struct ScCampaign **out);

// # Safety
// `campaign` must come from a `sc_campaign_run*` call; `out` must be writable.
enum ScStatus sc_campaign_summary(const struct ScCampaign *campaign, struct ScSummary *out);

// Success bit of record `index`.
//
// # Safety
// `campaign` must be a live handle and `out` writable.
enum ScStatus sc_campaign_record_success(const struct ScCampaign *campaign,
                                         size_t index,
                                         bool *out);

// # Safety
// `campaign` must be a live handle and `path` a NUL-terminated string.
enum ScStatus sc_campaign_export(const struct ScCampaign *campaign,
                                 const char *path,
                                 enum ScFormat format);

// # Safety
// `campaign` must be null or a handle not yet freed.
void sc_campaign_free(struct ScCampaign *campaign);

// Cluster state on an `n`-qubit ring; measurements draw from `seed`.
//
// # Safety
// `out` must be valid for writing a pointer.
enum ScStatus sc_tableau_new_lcs(size_t n, uint64_t seed, struct ScTableau **out);

// `|0...0>` on `n` qubits.
//
// # Safety
// `out` must be valid for writing a pointer.
enum ScStatus sc_tableau_new_zero(size_t n, uint64_t seed, struct ScTableau **out);

// # Safety
// `tableau` must be a live handle.
size_t sc_tableau_num_qubits(const struct ScTableau *tableau);

// Measure `qubit` in basis `'X'`, `'Y'` or `'Z'`, collapsing the state.
//
// # Safety
// `tableau` must be a live handle and `out` writable.
enum ScStatus sc_tableau_measure(struct ScTableau *tableau, size_t qubit, char basis, uint8_t *out);

// Outcome of measuring `qubit` if it is certain (0 or 1), otherwise -1.
//
// # Safety
// `tableau` must be a live handle and `out` writable.
enum ScStatus sc_tableau_deterministic(const struct ScTableau *tableau,
                                       size_t qubit,
                                       char basis,
                                       int32_t *out);

// # Safety
// `tableau` must be null or a handle not yet freed.
void sc_tableau_free(struct ScTableau *tableau);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SINGLECOPY_H */
