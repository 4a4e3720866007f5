#ifndef FMK3_H
#define FMK3_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by all functions.
 */
typedef enum Fmk3Status {
  FMK3_STATUS_OK = 0,
  FMK3_STATUS_NULL_POINTER = 1,
  FMK3_STATUS_INVALID_ARGUMENT = 2,
  FMK3_STATUS_INVALID_LEVEL = 3,
  FMK3_STATUS_INVALID_DETERMINANT = 4,
  FMK3_STATUS_LEVEL_MISMATCH = 5,
  FMK3_STATUS_NOT_AN_ISOMETRY = 6,
  FMK3_STATUS_NOT_INTEGRAL = 7,
  FMK3_STATUS_NOT_IN_IMAGE = 8,
  FMK3_STATUS_NUMERICAL = 9,
  FMK3_STATUS_OVERFLOW = 10,
  FMK3_STATUS_INTERNAL = 11,
  FMK3_STATUS_PANIC = 12,
} Fmk3Status;

/**
 * An element of the Atkin-Lehner group `AL_d`.
 */
typedef struct Fmk3AlElement Fmk3AlElement;

/**
 * A rational 3x3 matrix acting on the Mukai lattice `N_d`.
 */
typedef struct Fmk3Isometry Fmk3Isometry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The library version as a static nul-terminated string.
 */
const char *fmk3_version(void);

/**
 * The message of the last failure on this thread, empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *fmk3_last_error_message(void);

/**
 * # Safety
 * `s` must come from a function of this library and not be freed twice.
 */
void fmk3_string_free(char *s);

/**
 * The validated, sign-normalized element `(1/sqrt(s)) [[a s, b], [c d, e s]]`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum Fmk3Status fmk3_al_from_tuple(uint64_t d,
                                   uint64_t s,
                                   int64_t a,
                                   int64_t b,
                                   int64_t c,
                                   int64_t e,
                                   struct Fmk3AlElement **out);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
enum Fmk3Status fmk3_al_identity(uint64_t d, struct Fmk3AlElement **out);

/**
 * The canonical element of `W_s`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum Fmk3Status fmk3_al_base_element(uint64_t d, uint64_t s, struct Fmk3AlElement **out);

/**
 * A random element of `W_s`, reproducible from `seed`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum Fmk3Status fmk3_al_random(uint64_t d,
                               uint64_t s,
                               uint64_t seed,
                               int64_t bound,
                               struct Fmk3AlElement **out);

/**
 * Parses the JSON form `{"d":6,"s":2,"abce":["1","1","1","2"]}`.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` null or valid for writes.
 */
enum Fmk3Status fmk3_al_from_json(const char *json, struct Fmk3AlElement **out);

/**
 * The JSON form of `w`; release it with [`fmk3_string_free`].
 *
 * # Safety
 * `w` must be a live handle; `out` null or valid for writes.
 */
enum Fmk3Status fmk3_al_to_json(const struct Fmk3AlElement *w, char **out);

/**
 * # Safety
 * `w` must be null or a handle not yet freed.
 */
void fmk3_al_free(struct Fmk3AlElement *w);

/**
 * `x * y`.
 *
 * # Safety
 * `x`, `y` must be live handles; `out` null or valid for writes.
 */
enum Fmk3Status fmk3_al_mul(const struct Fmk3AlElement *x,
                            const struct Fmk3AlElement *y,
                            struct Fmk3AlElement **out);

/**
 * # Safety
 * `w` must be a live handle; `out` null or valid for writes.
 */
enum Fmk3Status fmk3_al_inverse(const struct Fmk3AlElement *w, struct Fmk3AlElement **out);

/**
 * # Safety
 * `x`, `y` must be live handles; `out` null or valid for writes.
 */
enum Fmk3Status fmk3_al_equal(const struct Fmk3AlElement *x,
                              const struct Fmk3AlElement *y,
                              bool *out);

/**
 * The level `d` and the coset label `s`.
 *
 * # Safety
 * `w` must be a live handle; `d`, `s` null or valid for writes.
 */
enum Fmk3Status fmk3_al_level(const struct Fmk3AlElement *w, uint64_t *d, uint64_t *s);

/**
 * # Safety
 * `w` must be a live handle; `out` null or valid for writes.
 */
enum Fmk3Status fmk3_al_is_fricke(const struct Fmk3AlElement *w, bool *out);

/**
 * Writes `(a, b, c, e)`; fails with `Overflow` if an entry exceeds 64 bits.
 *
 * # Safety
 * `w` must be a live handle; `out` null or valid for 4 writes.
 */
enum Fmk3Status fmk3_al_tuple(const struct Fmk3AlElement *w, int64_t *out);

/**
 * The isometry `R(w)` of `N_d`.
 *
 * # Safety
 * `w` must be a live handle; `out` null or valid for writes.
 */
enum Fmk3Status fmk3_represent(const struct Fmk3AlElement *w, struct Fmk3Isometry **out);

/**
 * An integer matrix from 9 row-major entries. No isometry check is made here.
 *
 * # Safety
 * `entries` must be valid for 9 reads; `out` null or valid for writes.
 */
enum Fmk3Status fmk3_isometry_from_entries(uint64_t d,
                                           const int64_t *entries,
                                           struct Fmk3Isometry **out);

/**
 * Writes the 9 row-major entries of an integral matrix.
 *
 * # Safety
 * `g` must be a live handle; `out` null or valid for 9 writes.
 */
enum Fmk3Status fmk3_isometry_entries(const struct Fmk3Isometry *g, int64_t *out);

/**
 * # Safety
 * `g` must be null or a handle not yet freed.
 */
void fmk3_isometry_free(struct Fmk3Isometry *g);

/**
 * The element `w` with `R(w) = ±g`.
 *
 * # Safety
 * `g` must be a live handle; `out` null or valid for writes.
 */
enum Fmk3Status fmk3_descend(const struct Fmk3Isometry *g, struct Fmk3AlElement **out);

/**
 * The unit `u mod 2d` by which `g` acts on the discriminant group.
 *
 * # Safety
 * `g` must be a live handle; `out` null or valid for writes.
 */
enum Fmk3Status fmk3_discriminant_unit(const struct Fmk3Isometry *g, uint64_t *out);

/**
 * # Safety
 * `g` must be a live handle; `out` null or valid for writes.
 */
enum Fmk3Status fmk3_is_orientation_preserving(const struct Fmk3Isometry *g, bool *out);

/**
 * The number of Fourier-Mukai partners of a degree `2d` K3 of Picard rank one.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum Fmk3Status fmk3_fm_number(uint64_t d, uint64_t *out);

/**
 * The least `n >= 0` with `(d/r) n ≡ -1 (mod r)`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum Fmk3Status fmk3_derive_n_y(uint64_t d, uint64_t r, int64_t *out);

/**
 * The image in `W_{d/r}` of the transform from the moduli space `M_L(r+L+d/r)`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum Fmk3Status fmk3_induced_transform(uint64_t d, uint64_t r, struct Fmk3AlElement **out);

/**
 * The fractional linear action of `w` on `u + iv`, `v > 0`.
 *
 * # Safety
 * `w` must be a live handle; `out_u`, `out_v` null or valid for writes.
 */
enum Fmk3Status fmk3_mobius(const struct Fmk3AlElement *w,
                            double u,
                            double v,
                            double *out_u,
                            double *out_v);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FMK3_H */
