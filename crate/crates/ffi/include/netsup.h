#ifndef NETSUP_H
#define NETSUP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NetsupStatus {
  /**
   * The call succeeded and its verdict is positive.
   */
  NETSUP_STATUS_OK = 0,
  /**
   * The call succeeded and its verdict is negative (unsolvable, a
   * condition fails, a run left the specification).
   */
  NETSUP_STATUS_NEGATIVE = 1,
  NETSUP_STATUS_NULL_ARGUMENT = 2,
  NETSUP_STATUS_INVALID_UTF8 = 3,
  NETSUP_STATUS_IO = 4,
  NETSUP_STATUS_JSON = 5,
  NETSUP_STATUS_SCHEMA = 6,
  NETSUP_STATUS_INVALID_MODEL = 7,
  NETSUP_STATUS_STATE_CAP = 8,
  NETSUP_STATUS_PANIC = 9,
} NetsupStatus;

typedef enum NetsupDotTarget {
  NETSUP_DOT_TARGET_PLANT = 0,
  NETSUP_DOT_TARGET_SPEC = 1,
  NETSUP_DOT_TARGET_COMM = 2,
  NETSUP_DOT_TARGET_OBSERVER = 3,
  NETSUP_DOT_TARGET_CLOSED_LOOP = 4,
} NetsupDotTarget;

/**
 * A validated model.
 */
typedef struct NetsupModel NetsupModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *netsup_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *netsup_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void netsup_string_free(char *s);

/**
 * Parses and validates a model document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum NetsupStatus netsup_model_from_json(const char *json, struct NetsupModel **out);

/**
 * Reads, parses and validates a model file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum NetsupStatus netsup_model_from_file(const char *path, struct NetsupModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle from this library not yet freed.
 */
void netsup_model_free(struct NetsupModel *model);

/**
 * Full solve report as JSON. Returns `Ok` if solvable, `Negative` otherwise.
 *
 * # Safety
 * `model` must be a live handle; `out_json` must be writable.
 */
enum NetsupStatus netsup_solve(const struct NetsupModel *model, bool diagnostic, char **out_json);

/**
 * Existence-condition verdicts as JSON. Returns `Ok` if all hold.
 *
 * # Safety
 * `model` must be a live handle; `out_json` must be writable.
 */
enum NetsupStatus netsup_check(const struct NetsupModel *model, char **out_json);

/**
 * Synthesized supervisors as JSON. Without `diagnostic`, an unsolvable
 * model yields `Negative` and leaves `out_json` untouched.
 *
 * # Safety
 * `model` must be a live handle; `out_json` must be writable.
 */
enum NetsupStatus netsup_synthesize(const struct NetsupModel *model,
                                    bool diagnostic,
                                    char **out_json);

/**
 * One seeded closed-loop run as JSON lines. Returns `Negative` if the run
 * leaves the specification.
 *
 * # Safety
 * `model` must be a live handle; `out_jsonl` must be writable.
 */
enum NetsupStatus netsup_simulate(const struct NetsupModel *model,
                                  uint64_t seed,
                                  size_t steps,
                                  char **out_jsonl);

/**
 * Graphviz rendering. `supervisor` (1-based) selects the observer for
 * `NetsupDotTarget::Observer` and is ignored otherwise.
 *
 * # Safety
 * `model` must be a live handle; `out_dot` must be writable.
 */
enum NetsupStatus netsup_export_dot(const struct NetsupModel *model,
                                    enum NetsupDotTarget target,
                                    size_t supervisor,
                                    char **out_dot);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETSUP_H */
