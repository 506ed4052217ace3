#ifndef HERMITE_CD_H
#define HERMITE_CD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HcdStatus {
  HCD_STATUS_OK = 0,
  HCD_STATUS_NULL_POINTER = 1,
  HCD_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Singular matrix or residual check failed.
   */
  HCD_STATUS_SOLVER_FAILURE = 3,
  /**
   * Other numerical failure (Gram matrix, non-finite values, size guard).
   */
  HCD_STATUS_NUMERICAL = 4,
  HCD_STATUS_IO = 5,
  HCD_STATUS_PANIC = 6,
} HcdStatus;

typedef enum HcdMethod {
  HCD_METHOD_A = 0,
  HCD_METHOD_HA = 1,
  HCD_METHOD_B = 2,
  HCD_METHOD_HB = 3,
} HcdMethod;

typedef enum HcdSourceMode {
  HCD_SOURCE_MODE_FIXED_F = 0,
  HCD_SOURCE_MODE_REGEN_F = 1,
} HcdSourceMode;

/**
 * Opaque mesh handle.
 */
typedef struct HcdMesh HcdMesh;

/**
 * Opaque solved case.
 */
typedef struct HcdSolution HcdSolution;

typedef struct HcdErrorReport {
  double h;
  double e_u;
  double e_grad;
  double e_divflux;
  double e_max;
  uint64_t dofs;
} HcdErrorReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next
 * failing call on the same thread.
 */
const char *hcd_last_error(void);

/**
 * Builds the mesh of a built-in problem (1: unit square, 2: quarter disk).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum HcdStatus hcd_mesh_new(uint32_t problem, uint32_t l, struct HcdMesh **out);

/**
 * # Safety
 * `mesh` must be NULL or a handle from [`hcd_mesh_new`] not yet freed.
 */
void hcd_mesh_free(struct HcdMesh *mesh);

/**
 * # Safety
 * `mesh` must be a live handle; the output pointers must be valid.
 */
enum HcdStatus hcd_mesh_counts(const struct HcdMesh *mesh,
                               uint64_t *vertices,
                               uint64_t *edges,
                               uint64_t *triangles);

/**
 * Copies vertex coordinates as `x0, y0, x1, y1, ...`; `len` is the buffer length
 * in doubles and must be at least twice the vertex count.
 *
 * # Safety
 * `mesh` must be a live handle and `buf` valid for `len` writes.
 */
enum HcdStatus hcd_mesh_copy_vertices(const struct HcdMesh *mesh, double *buf, size_t len);

/**
 * Runs one case of a built-in problem and writes its error measures.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HcdStatus hcd_run_case(uint32_t problem,
                            enum HcdMethod method_id,
                            double peclet,
                            uint32_t l,
                            enum HcdSourceMode source_mode,
                            struct HcdErrorReport *out);

/**
 * Solves a built-in problem and keeps the solution for inspection.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum HcdStatus hcd_solve(uint32_t problem,
                         enum HcdMethod method_id,
                         double peclet,
                         uint32_t l,
                         enum HcdSourceMode source_mode,
                         struct HcdSolution **out);

/**
 * # Safety
 * `solution` must be NULL or a handle from [`hcd_solve`] not yet freed.
 */
void hcd_solution_free(struct HcdSolution *solution);

/**
 * Number of DOFs (edges, then triangles).
 *
 * # Safety
 * `solution` must be NULL or a live handle.
 */
uint64_t hcd_solution_dof_count(const struct HcdSolution *solution);

/**
 * # Safety
 * `solution` must be a live handle and `buf` valid for `len` writes.
 */
enum HcdStatus hcd_solution_copy_dofs(const struct HcdSolution *solution, double *buf, size_t len);

/**
 * # Safety
 * `solution` must be a live handle and `out` a valid pointer.
 */
enum HcdStatus hcd_solution_errors(const struct HcdSolution *solution, struct HcdErrorReport *out);

/**
 * Discrete inf-sup estimate of method hA on a built-in problem; `auxiliary`
 * selects the form with the exact velocity in the convective term.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HcdStatus hcd_infsup(uint32_t problem, double peclet, uint32_t l, bool auxiliary, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HERMITE_CD_H */
