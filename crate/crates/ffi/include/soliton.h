#ifndef SOLITON_H
#define SOLITON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SolitonStatus {
  SOLITON_STATUS_OK = 0,
  SOLITON_STATUS_NULL_POINTER = 1,
  SOLITON_STATUS_INVALID_INPUT = 2,
  SOLITON_STATUS_POLE = 3,
  SOLITON_STATUS_NOT_CLOSED = 4,
  SOLITON_STATUS_NUMERIC = 5,
  SOLITON_STATUS_IO = 6,
  SOLITON_STATUS_OUT_OF_RANGE = 7,
  SOLITON_STATUS_PANIC = 8,
} SolitonStatus;

typedef enum SolitonSuite {
  SOLITON_SUITE_ALGEBRA = 0,
  SOLITON_SUITE_ZCC = 1,
  SOLITON_SUITE_SYMMETRY = 2,
  SOLITON_SUITE_FRAME = 3,
  SOLITON_SUITE_GEOMETRY = 4,
  SOLITON_SUITE_ALL = 5,
} SolitonSuite;

typedef struct SolitonConfig SolitonConfig;

typedef struct SolitonGeometry SolitonGeometry;

typedef struct SolitonSurface SolitonSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread ("" after a success).
 The pointer stays valid until the next call into this library.
 */
const char *soliton_last_error(void);

/*
 Killing form ½ tr(XY) of two real 2×2 matrices given row-major.

 # Safety
 `x` and `y` point to 4 doubles, `out` to one.
 */
enum SolitonStatus soliton_killing(const double *x, const double *y, double *out);

/*
 Components (c1, c2, c3) of a traceless real matrix in the e1, e2, e3 basis.

 # Safety
 `x` points to 4 doubles, `out` to 3.
 */
enum SolitonStatus soliton_decompose(const double *x, double *out);

/*
 Parses a TOML run configuration.

 # Safety
 `text` is a NUL-terminated string; `out` is writable.
 */
enum SolitonStatus soliton_config_parse(const char *text, struct SolitonConfig **out);

/*
 # Safety
 `cfg` is null or came from [`soliton_config_parse`] and is not used again.
 */
void soliton_config_free(struct SolitonConfig *cfg);

/*
 Builds the configured surface.

 # Safety
 `cfg` is a live config; `out` is writable.
 */
enum SolitonStatus soliton_surface_build(const struct SolitonConfig *cfg,
                                         struct SolitonSurface **out);

/*
 Number of surface nodes (grid nodes outside the exclusion bands).

 # Safety
 `s` is null or a live surface.
 */
uintptr_t soliton_surface_len(const struct SolitonSurface *s);

/*
 Node `k` as (t, lambda, F1, F2, F3), row-major over the grid.

 # Safety
 `s` is a live surface; `out` points to 5 doubles.
 */
enum SolitonStatus soliton_surface_node(const struct SolitonSurface *s, uintptr_t k, double *out);

/*
 Writes the surface as an OBJ mesh.

 # Safety
 `s` is a live surface; `path` is a NUL-terminated string.
 */
enum SolitonStatus soliton_surface_write_obj(const struct SolitonSurface *s, const char *path);

/*
 # Safety
 `s` is null or came from [`soliton_surface_build`] and is not used again.
 */
void soliton_surface_free(struct SolitonSurface *s);

/*
 Fundamental forms and curvatures on the configured grid.

 # Safety
 `cfg` is a live config; `out` is writable.
 */
enum SolitonStatus soliton_geometry_build(const struct SolitonConfig *cfg,
                                          struct SolitonGeometry **out);

/*
 # Safety
 `g` is null or a live geometry.
 */
uintptr_t soliton_geometry_len(const struct SolitonGeometry *g);

/*
 Node `k` as (t, lambda, g11, g12, g22, det_g, K, H); K and H are NaN
 where undefined.

 # Safety
 `g` is a live geometry; `out` points to 8 doubles.
 */
enum SolitonStatus soliton_geometry_node(const struct SolitonGeometry *g, uintptr_t k, double *out);

/*
 # Safety
 `g` is null or came from [`soliton_geometry_build`] and is not used again.
 */
void soliton_geometry_free(struct SolitonGeometry *g);

/*
 Runs a check suite; `failures` receives the number of failed checks.

 # Safety
 `failures` points to a writable size_t.
 */
enum SolitonStatus soliton_verify(enum SolitonSuite suite, uintptr_t *failures);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SOLITON_H */
