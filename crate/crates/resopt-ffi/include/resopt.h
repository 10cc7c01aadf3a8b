/* C interface for the resopt energy system optimiser. */

#ifndef RESOPT_H
#define RESOPT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Graph document flavour for [`resopt_model_graph`].
typedef enum ResoptGraphFormat {
  RESOPT_GRAPH_FORMAT_DOT = 0,
  RESOPT_GRAPH_FORMAT_GRAPHML = 1,
} ResoptGraphFormat;

// Result of a call into this library.
typedef enum ResoptStatus {
  // The call succeeded.
  RESOPT_STATUS_OK = 0,
  // A pointer was null, a string was not UTF-8, or the request does not
  // apply to the given object.
  RESOPT_STATUS_INVALID_ARGUMENT = 1,
  // The document is not parseable into a system.
  RESOPT_STATUS_PARSE_ERROR = 2,
  // The system violates validation rules.
  RESOPT_STATUS_VALIDATION_ERROR = 3,
  // The system cannot be lowered into a solvable model.
  RESOPT_STATUS_LOWERING_ERROR = 4,
  // The model admits no feasible point.
  RESOPT_STATUS_INFEASIBLE = 5,
  // The objective is unbounded below.
  RESOPT_STATUS_UNBOUNDED = 6,
  // The solver failed numerically or an internal error occurred.
  RESOPT_STATUS_SOLVER_ERROR = 7,
} ResoptStatus;

// Opaque lowered optimisation model.
typedef struct ResoptModel ResoptModel;

// Opaque solver result.
typedef struct ResoptSolution ResoptSolution;

// Opaque parsed energy system.
typedef struct ResoptSystem ResoptSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or null when
// no call has failed yet. The pointer is invalidated by the next failing
// call on the same thread; do not free it.
const char *resopt_last_error(void);

// Parses a YAML document into an energy system. `base_dir` resolves
// relative `file=` series references; pass null for the current directory.
//
// # Safety
// `yaml` must be a valid NUL-terminated string; `base_dir` must be null or
// a valid NUL-terminated string; `out` must be a valid pointer.
enum ResoptStatus resopt_parse(const char *yaml, const char *base_dir, struct ResoptSystem **out);

// Validates a system. Returns `Ok` for a clean system; otherwise
// `ValidationError` with one issue per line in the error message.
//
// # Safety
// `system` must be a handle returned by [`resopt_parse`].
enum ResoptStatus resopt_system_validate(const struct ResoptSystem *system);

// Renders the canonical, self-contained YAML form of a system.
//
// # Safety
// `system` must be a handle returned by [`resopt_parse`]; `out` must be a
// valid pointer. The returned string is released with
// [`resopt_string_free`].
enum ResoptStatus resopt_system_export_yaml(const struct ResoptSystem *system, char **out);

// Lowers a validated system into an optimisation model.
//
// # Safety
// `system` must be a handle returned by [`resopt_parse`]; `out` must be a
// valid pointer.
enum ResoptStatus resopt_system_lower(const struct ResoptSystem *system,
                                      bool time_discrete,
                                      bool strict_levels,
                                      bool cyclic_storage,
                                      struct ResoptModel **out);

// Solves a model to the given absolute optimality gap (1e-6 is the
// default elsewhere). On `Ok`, `Infeasible`, and `Unbounded` a solution
// handle carrying solver statistics is written to `out`; on `SolverError`
// the handle is left untouched.
//
// # Safety
// `model` must be a handle returned by [`resopt_system_lower`]; `out` must
// be a valid pointer.
enum ResoptStatus resopt_model_solve(const struct ResoptModel *model,
                                     double abs_gap,
                                     struct ResoptSolution **out);

// Reads the objective value of an optimal solution.
//
// # Safety
// `solution` must be a handle returned by [`resopt_model_solve`]; `out`
// must be a valid pointer.
enum ResoptStatus resopt_solution_objective(const struct ResoptSolution *solution, double *out);

// Reads branch-and-bound node and simplex iteration counts.
//
// # Safety
// `solution` must be a handle returned by [`resopt_model_solve`]; `nodes`
// and `iterations` must be valid pointers.
enum ResoptStatus resopt_solution_stats(const struct ResoptSolution *solution,
                                        uint64_t *nodes,
                                        uint64_t *iterations);

// Renders every flow of an optimal solution as CSV
// (`time,source,target,value,tags`).
//
// # Safety
// `model` and `solution` must be handles from this library belonging to
// the same pipeline run; `out` must be a valid pointer. The returned
// string is released with [`resopt_string_free`].
enum ResoptStatus resopt_flows_csv(const struct ResoptModel *model,
                                   const struct ResoptSolution *solution,
                                   char **out);

// Renders the model as LP-format text.
//
// # Safety
// `model` must be a handle returned by [`resopt_system_lower`]; `out` must
// be a valid pointer. The returned string is released with
// [`resopt_string_free`].
enum ResoptStatus resopt_model_export_lp(const struct ResoptModel *model, char **out);

// Renders the `kind,sanitized,original` name table accompanying the LP
// export, mapping sanitised LP names back to model names.
//
// # Safety
// `model` must be a handle returned by [`resopt_system_lower`]; `out` must
// be a valid pointer. The returned string is released with
// [`resopt_string_free`].
enum ResoptStatus resopt_model_lp_names(const struct ResoptModel *model, char **out);

// Renders the model's node graph as DOT or GraphML text.
//
// # Safety
// `model` must be a handle returned by [`resopt_system_lower`]; `out` must
// be a valid pointer. The returned string is released with
// [`resopt_string_free`].
enum ResoptStatus resopt_model_graph(const struct ResoptModel *model,
                                     enum ResoptGraphFormat format,
                                     char **out);

// Releases a string returned by this library. Accepts null.
//
// # Safety
// `s` must be null or a string returned by this library that has not been
// freed yet.
void resopt_string_free(char *s);

// Releases a system handle. Accepts null.
//
// # Safety
// `system` must be null or an unfreed handle from [`resopt_parse`].
void resopt_system_free(struct ResoptSystem *system);

// Releases a model handle. Accepts null.
//
// # Safety
// `model` must be null or an unfreed handle from [`resopt_system_lower`].
void resopt_model_free(struct ResoptModel *model);

// Releases a solution handle. Accepts null.
//
// # Safety
// `solution` must be null or an unfreed handle from
// [`resopt_model_solve`].
void resopt_solution_free(struct ResoptSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESOPT_H */
