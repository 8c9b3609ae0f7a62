#ifndef FERMION_SHADOWS_H
#define FERMION_SHADOWS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FsStatus {
  FS_STATUS_OK = 0,
  FS_STATUS_NULL_POINTER = 1,
  FS_STATUS_INVALID_ARGUMENT = 2,
  FS_STATUS_SIZE_LIMIT = 3,
  FS_STATUS_OVERFLOW = 4,
  FS_STATUS_PARSE = 5,
  FS_STATUS_IO = 6,
  FS_STATUS_INTERNAL = 7,
} FsStatus;

typedef enum FsStrategy {
  FS_STRATEGY_SWAP1 = 0,
  FS_STRATEGY_EQOT = 1,
  FS_STRATEGY_MT2 = 2,
  FS_STRATEGY_MT3 = 3,
  FS_STRATEGY_MT4 = 4,
  FS_STRATEGY_SWAP_K = 5,
  FS_STRATEGY_NAIVE = 6,
} FsStrategy;

typedef enum FsMapping {
  FS_MAPPING_JORDAN_WIGNER = 0,
  FS_MAPPING_BRAVYI_KITAEV = 1,
} FsMapping;

typedef enum FsEnsemble {
  FS_ENSEMBLE_FGU = 0,
  FS_ENSEMBLE_NC = 1,
} FsEnsemble;

/**
 * Opaque measurement plan.
 */
typedef struct FsPlan FsPlan;

/**
 * Opaque k-RDM, row-major over colex-ranked mode tuples.
 */
typedef struct FsRdm FsRdm;

/**
 * Opaque dense reference state together with the mapping used to build it.
 */
typedef struct FsState FsState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *fs_last_error_message(void);

/**
 * FGU channel eigenvalue `C(n,k)/C(2n,2k)`.
 */
enum FsStatus fs_channel_eigenvalue(size_t n, size_t k, double *out);

enum FsStatus fs_shadow_norm_sq(size_t n, size_t k, double *out);

/**
 * Bernstein sample budget for `l` observables at accuracy `epsilon` and
 * failure probability `delta`.
 */
enum FsStatus fs_bernstein_samples(double epsilon,
                                   double delta,
                                   uint64_t l,
                                   double max_norm_sq,
                                   uint64_t *out);

enum FsStatus fs_eqot(size_t k, size_t n, uint64_t *out);

enum FsStatus fs_strategy_count(enum FsStrategy strategy, size_t k, size_t n, uint64_t *out);

/**
 * Qubit support size of the Majorana monomial with sorted wire `indices`.
 */
enum FsStatus fs_majorana_locality(enum FsMapping mapping,
                                   size_t n,
                                   const size_t *indices,
                                   size_t len,
                                   size_t *out);

/**
 * Exact NC shadow norm `1/λ_μ`.
 */
enum FsStatus fs_nc_shadow_norm_sq(enum FsMapping mapping,
                                   size_t n,
                                   const size_t *indices,
                                   size_t len,
                                   double *out);

/**
 * Draws settings until every degree-≤2k target is covered `r` times.
 */
enum FsStatus fs_plan_new_coverage(size_t n,
                                   size_t k,
                                   enum FsEnsemble ensemble,
                                   enum FsMapping mapping,
                                   uint64_t r,
                                   uint64_t seed,
                                   struct FsPlan **out);

enum FsStatus fs_plan_len(const struct FsPlan *plan, size_t *out);

/**
 * Serialises a plan; release the string with [`fs_string_free`].
 */
enum FsStatus fs_plan_to_json(const struct FsPlan *plan, char **out);

void fs_plan_free(struct FsPlan *plan);

void fs_string_free(char *s);

/**
 * Fock state from `n` occupation numbers (0 or 1), mode 0 first.
 */
enum FsStatus fs_state_fock(enum FsMapping mapping,
                            const uint8_t *occupations,
                            size_t n,
                            struct FsState **out);

/**
 * Seeded full-rank random mixed state.
 */
enum FsStatus fs_state_random(enum FsMapping mapping,
                              size_t n,
                              uint64_t seed,
                              struct FsState **out);

void fs_state_free(struct FsState *state);

/**
 * Simulates `shots` shots per plan setting and assembles the k-RDM.
 */
enum FsStatus fs_estimate_rdm(const struct FsState *state,
                              const struct FsPlan *plan,
                              size_t k,
                              size_t shots,
                              uint64_t seed,
                              struct FsRdm **out);

/**
 * Side length `C(n,k)` of the RDM matrix.
 */
enum FsStatus fs_rdm_dim(const struct FsRdm *rdm, size_t *out);

enum FsStatus fs_rdm_get(const struct FsRdm *rdm, size_t p, size_t q, double *re, double *im);

void fs_rdm_free(struct FsRdm *rdm);

/**
 * Library version as a static string.
 */
const char *fs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FERMION_SHADOWS_H */
