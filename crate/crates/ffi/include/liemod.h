#ifndef LIEMOD_H
#define LIEMOD_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LiemodStatus {
  LIEMOD_STATUS_OK = 0,
  LIEMOD_STATUS_IO = 1,
  LIEMOD_STATUS_RESOURCE = 2,
  LIEMOD_STATUS_INVALID_INPUT = 3,
  LIEMOD_STATUS_INTERNAL = 4,
  LIEMOD_STATUS_NULL_POINTER = 5,
  LIEMOD_STATUS_PANIC = 6,
} LiemodStatus;

/*
 Action matrices of a list of permutations on `Lie(n)` over `GF(p)`.
 */
typedef struct LiemodRepresentation LiemodRepresentation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. Valid until the
 next call into the library from this thread.
 */
const char *liemod_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *liemod_version(void);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void liemod_string_free(char *s);

/*
 Builds the action matrices of the generators on `Lie(n)` over `GF(p)`.
 `generators` holds cycle notation separated by `;`, e.g.
 `"(1,2)(3,4);(1,3)(2,4)"`. `force` lifts the default size cap.

 # Safety
 `generators` must be a valid C string and `out` a valid pointer.
 */
enum LiemodStatus liemod_representation_new(size_t n,
                                            uint32_t p,
                                            const char *generators,
                                            bool force,
                                            struct LiemodRepresentation **out);

/*
 # Safety
 `rep` must be null or a handle from [`liemod_representation_new`], not yet freed.
 */
void liemod_representation_free(struct LiemodRepresentation *rep);

/*
 `(n-1)!`, or 0 for a null handle.

 # Safety
 `rep` must be null or a live handle.
 */
size_t liemod_representation_dim(const struct LiemodRepresentation *rep);

/*
 Number of generator matrices, or 0 for a null handle.

 # Safety
 `rep` must be null or a live handle.
 */
size_t liemod_representation_count(const struct LiemodRepresentation *rep);

/*
 Copies matrix `index` row-major into `buf`, which must hold `dim * dim`
 entries.

 # Safety
 `rep` must be a live handle and `buf` valid for `len` writes.
 */
enum LiemodStatus liemod_representation_copy_matrix(const struct LiemodRepresentation *rep,
                                                    size_t index,
                                                    uint16_t *buf,
                                                    size_t len);

/*
 Rank-variety analysis of the handle's matrices as JSON. `mode` is one of
 `scan`, `sigma`, `generic`, `full`; `ext` is the largest extension degree
 scanned (0 for the default).

 # Safety
 `rep` must be a live handle, `mode` a valid C string, `out` a valid pointer.
 */
enum LiemodStatus liemod_variety_json(const struct LiemodRepresentation *rep,
                                      const char *mode,
                                      uint32_t ext,
                                      char **out);

/*
 Complexity certificate of `Lie(n)` over `GF(p)` as JSON.

 # Safety
 `out` must be a valid pointer.
 */
enum LiemodStatus liemod_complexity_json(size_t n, uint32_t p, bool force, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIEMOD_H */
