#ifndef PLUMBING_H
#define PLUMBING_H

#pragma once

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. The first four match the exit codes of the `plumbing` binary.
 */
typedef enum PlumbingStatus {
  PLUMBING_STATUS_OK = 0,
  /**
   * The graph violates the plumbing hypotheses.
   */
  PLUMBING_STATUS_REJECTED = 1,
  /**
   * A numerical or homological check failed.
   */
  PLUMBING_STATUS_CHECK_FAILED = 2,
  PLUMBING_STATUS_INPUT_ERROR = 3,
  PLUMBING_STATUS_NULL_POINTER = 4,
  PLUMBING_STATUS_INVALID_UTF8 = 5,
  PLUMBING_STATUS_PANIC = 6,
} PlumbingStatus;

/**
 * Opaque compiled Lefschetz fibration / open book.
 */
typedef struct PlumbingCompiled PlumbingCompiled;

/**
 * Opaque parsed graph.
 */
typedef struct PlumbingGraph PlumbingGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into the library on this thread.
 */
const char *plumbing_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void plumbing_string_free(char *s);

/**
 * Library version as a static NUL-terminated string.
 */
const char *plumbing_version(void);

/**
 * Parses a graph document. Loops give `REJECTED`; other parse errors give
 * `INPUT_ERROR`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum PlumbingStatus plumbing_graph_from_json(const char *json, struct PlumbingGraph **out);

/**
 * # Safety
 * `graph` must come from [`plumbing_graph_from_json`] and not have been freed.
 */
void plumbing_graph_free(struct PlumbingGraph *graph);

/**
 * Number of vertices, or 0 for NULL.
 *
 * # Safety
 * `graph` must be NULL or a live handle.
 */
size_t plumbing_graph_vertex_count(const struct PlumbingGraph *graph);

/**
 * Writes the validation report as JSON. Returns `OK` when every hypothesis
 * holds and `REJECTED` otherwise; the report is written in both cases.
 *
 * # Safety
 * `graph` must be a live handle and `report_json` writable.
 */
enum PlumbingStatus plumbing_graph_validate(const struct PlumbingGraph *graph, char **report_json);

/**
 * Compiles the fibration. With `force` nonzero a graph failing the
 * hypotheses is compiled and marked as such.
 *
 * # Safety
 * `graph` must be a live handle and `out` writable.
 */
enum PlumbingStatus plumbing_compile(const struct PlumbingGraph *graph,
                                     bool force,
                                     struct PlumbingCompiled **out);

/**
 * # Safety
 * `compiled` must come from [`plumbing_compile`] and not have been freed.
 */
void plumbing_compiled_free(struct PlumbingCompiled *compiled);

/**
 * Page genus, boundary count and number of vanishing cycles.
 *
 * # Safety
 * `compiled` must be a live handle; the out-pointers must be writable.
 */
enum PlumbingStatus plumbing_compiled_page(const struct PlumbingCompiled *compiled,
                                           uint64_t *genus,
                                           uint64_t *boundary,
                                           size_t *vanishing_cycles);

/**
 * The interchange document.
 *
 * # Safety
 * `compiled` must be a live handle and `json` writable.
 */
enum PlumbingStatus plumbing_compiled_to_json(const struct PlumbingCompiled *compiled, char **json);

/**
 * Solves the area system. `areas` is a comma-separated list of B_v/π in
 * vertex order, e.g. `"1,3/2"`.
 *
 * # Safety
 * `graph` must be a live handle, `areas` NUL-terminated, `json` writable.
 */
enum PlumbingStatus plumbing_area_system(const struct PlumbingGraph *graph,
                                         const char *areas,
                                         char **json);

/**
 * Boundary homology of the plumbing as JSON.
 *
 * # Safety
 * `graph` must be a live handle and `json` writable.
 */
enum PlumbingStatus plumbing_boundary_homology(const struct PlumbingGraph *graph, char **json);

/**
 * Substitution report against a built-in relation (`builtin` non-NULL) or
 * a relation document (`relation_json` non-NULL). Exactly one must be given.
 *
 * # Safety
 * `graph` must be a live handle, the strings NULL or NUL-terminated, `json` writable.
 */
enum PlumbingStatus plumbing_substitute(const struct PlumbingGraph *graph,
                                        const char *builtin,
                                        const char *relation_json,
                                        char **json);

/**
 * Runs the numerical battery on a constants document (NULL for the built-in
 * reference model) and writes the reports. `tolerance <= 0` keeps the
 * default tolerances.
 *
 * # Safety
 * `constants_json` must be NULL or NUL-terminated and `json` writable.
 */
enum PlumbingStatus plumbing_verify_model(const char *constants_json,
                                          double step,
                                          size_t samples,
                                          uint64_t seed,
                                          double tolerance,
                                          char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLUMBING_H */
