#ifndef ELLUNIT_H
#define ELLUNIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum EllunitStatus {
  ELLUNIT_STATUS_OK = 0,
  ELLUNIT_STATUS_INVALID_INPUT = 1,
  ELLUNIT_STATUS_VALIDATION = 2,
  ELLUNIT_STATUS_MODEL_DISCREPANCY = 3,
  ELLUNIT_STATUS_NOT_SUBLATTICE = 4,
  ELLUNIT_STATUS_INTERNAL = 5,
  ELLUNIT_STATUS_IO = 6,
  ELLUNIT_STATUS_NULL_POINTER = 7,
  ELLUNIT_STATUS_PANIC = 8,
} EllunitStatus;

/**
 * Opaque handle to a validated instance.
 */
typedef struct EllunitInstance EllunitInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse and validate an instance from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer. On
 * success `*out` owns a handle that must be released with
 * [`ellunit_instance_free`]; on failure `*out` is set to NULL.
 */
enum EllunitStatus ellunit_instance_from_json(const char *json, struct EllunitInstance **out);

/**
 * Release a handle. NULL is ignored.
 *
 * # Safety
 * `instance` must come from [`ellunit_instance_from_json`] and not be used afterwards.
 */
void ellunit_instance_free(struct EllunitInstance *instance);

/**
 * Prime `p` and exponent `k` of the instance.
 *
 * # Safety
 * `instance` must be a live handle; `p` and `k` writable pointers.
 */
enum EllunitStatus ellunit_instance_shape(const struct EllunitInstance *instance,
                                          uint64_t *p,
                                          uint32_t *k);

/**
 * Run `command` and write the report document as pretty JSON to `*out_json`.
 *
 * `command` is one of `validate`, `derive`, `build`, `solve`, `extend`,
 * `annihilate`, `selftest` or `report`. `options_json` may be NULL or a JSON
 * object with keys `seed`, `all_j`, `level`, `m`, `lambda_extra`, `kappa`, `f`.
 *
 * A document is produced whenever the command ran, including when one of its
 * checks failed; the status then names the failure class. `*out_json` is NULL
 * only if the options or arguments were rejected before running.
 *
 * # Safety
 * `instance` must be a live handle, the strings NUL-terminated, and `out_json`
 * writable. A returned string must be released with [`ellunit_string_free`].
 */
enum EllunitStatus ellunit_run(const struct EllunitInstance *instance,
                               const char *command,
                               const char *options_json,
                               char **out_json);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ellunit_string_free(char *s);

/**
 * Message of the last failure on this thread, or NULL.
 *
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *ellunit_last_error(void);

/**
 * Exit code the command-line tool uses for `status`.
 */
int32_t ellunit_status_exit_code(enum EllunitStatus status);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ellunit_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ELLUNIT_H */
