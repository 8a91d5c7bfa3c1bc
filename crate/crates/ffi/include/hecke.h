#ifndef HECKE_H
#define HECKE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Built-in one-dimensional characters.
 */
typedef enum HkCharacter {
  HK_CHARACTER_TRIV = 0,
  HK_CHARACTER_SIGN = 1,
  HK_CHARACTER_SIGN_STAR = 2,
} HkCharacter;

/**
 * Answer of [`hk_module_is_isomorphic`].
 */
typedef enum HkIso {
  HK_ISO_NO = 0,
  HK_ISO_YES = 1,
  HK_ISO_INCONCLUSIVE = 2,
} HkIso;

typedef enum HkStatus {
  HK_STATUS_OK = 0,
  HK_STATUS_NULL_POINTER = 1,
  HK_STATUS_INVALID_ARGUMENT = 2,
  HK_STATUS_DIMENSION_MISMATCH = 3,
  HK_STATUS_DESCRIPTOR_MISMATCH = 4,
  HK_STATUS_RELATION_VIOLATED = 5,
  HK_STATUS_NOT_POSITIVE = 6,
  HK_STATUS_BUDGET_EXCEEDED = 7,
  HK_STATUS_PARSE = 8,
  HK_STATUS_UNKNOWN_FIXTURE = 9,
  HK_STATUS_FIXTURE = 10,
  HK_STATUS_INTERNAL = 11,
  HK_STATUS_PANIC = 12,
} HkStatus;

/**
 * An algebra together with its torus Levi datum.
 */
typedef struct HkAlgebra HkAlgebra;

typedef struct HkModule HkModule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *hk_last_error(void);

/**
 * # Safety
 * `s` is NULL or a string returned by this library that was not yet freed.
 */
void hk_string_free(char *s);

/**
 * Builds the algebra of `group` ("SL2", "GL2" or "Torus(n)") over `F_{p^e}`.
 *
 * # Safety
 * `group` is a NUL-terminated string; `out_alg` is writable.
 */
enum HkStatus hk_algebra_new(const char *group, uint32_t p, uint32_t e, struct HkAlgebra **out_alg);

/**
 * # Safety
 * `alg` is NULL or a handle from [`hk_algebra_new`] that was not yet freed.
 */
void hk_algebra_free(struct HkAlgebra *alg);

/**
 * Structure constants of basis products up to `max_length`, as text.
 *
 * # Safety
 * `alg` is a live handle; `out_text` is writable.
 */
enum HkStatus hk_algebra_structure_constants(const struct HkAlgebra *alg,
                                             size_t max_length,
                                             char **out_text);

/**
 * # Safety
 * `alg` is a live handle; `out_module` is writable.
 */
enum HkStatus hk_module_character(const struct HkAlgebra *alg,
                                  enum HkCharacter which,
                                  struct HkModule **out_module);

/**
 * `Ind(chi)` for the torus character with finite part `exps` and values
 * `unram` on the `p`-power translations, both of length `rank`.
 *
 * # Safety
 * `alg` is a live handle; `exps` and `unram` point to `rank` elements;
 * `out_module` is writable.
 */
enum HkStatus hk_module_induced(const struct HkAlgebra *alg,
                                const int64_t *exps,
                                const uint32_t *unram,
                                size_t rank,
                                struct HkModule **out_module);

/**
 * The simple supersingular module with parameter `r` (GL2: `m(r,0,1)`,
 * SL2: `m_r`).
 *
 * # Safety
 * `alg` is a live handle; `out_module` is writable.
 */
enum HkStatus hk_module_supersingular(const struct HkAlgebra *alg,
                                      int64_t r,
                                      struct HkModule **out_module);

/**
 * # Safety
 * `m` is NULL or a module handle that was not yet freed.
 */
void hk_module_free(struct HkModule *m);

/**
 * Dimension of a module, or 0 for NULL.
 *
 * # Safety
 * `m` is NULL or a live module handle.
 */
size_t hk_module_dim(const struct HkModule *m);

/**
 * # Safety
 * `m` is a live handle; `out_module` is writable.
 */
enum HkStatus hk_module_dual(const struct HkModule *m, struct HkModule **out_module);

/**
 * # Safety
 * `a` and `b` are live handles; `out_module` is writable.
 */
enum HkStatus hk_module_direct_sum(const struct HkModule *a,
                                   const struct HkModule *b,
                                   struct HkModule **out_module);

/**
 * `R(m)`, a module over the torus algebra.
 *
 * # Safety
 * `alg` is the live algebra `m` was built over; `out_module` is writable.
 */
enum HkStatus hk_module_right_adjoint(const struct HkAlgebra *alg,
                                      const struct HkModule *m,
                                      struct HkModule **out_module);

/**
 * # Safety
 * `a` and `b` are live handles; `out_iso` is writable.
 */
enum HkStatus hk_module_is_isomorphic(const struct HkModule *a,
                                      const struct HkModule *b,
                                      enum HkIso *out_iso);

/**
 * `dim Hom(a, b)`.
 *
 * # Safety
 * `a` and `b` are live handles; `out_dim` is writable.
 */
enum HkStatus hk_hom_dim(const struct HkModule *a, const struct HkModule *b, size_t *out_dim);

/**
 * Verifies one fixture and writes its report as JSON. `out_passed` is set to
 * true when no check failed.
 *
 * # Safety
 * `id` is a NUL-terminated string; `out_json` and `out_passed` are writable.
 */
enum HkStatus hk_run_fixture(const char *id,
                             uint32_t p,
                             uint32_t e,
                             uint64_t seed,
                             bool assume_split,
                             char **out_json,
                             bool *out_passed);

/**
 * Propagates a page given in the page text format and writes the facts and
 * any contradiction as JSON.
 *
 * # Safety
 * `page` is a NUL-terminated string; `out_json` is writable.
 */
enum HkStatus hk_ss_solve(const char *page, bool assume_split, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HECKE_H */
