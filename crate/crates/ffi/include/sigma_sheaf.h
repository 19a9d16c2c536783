#ifndef SIGMA_SHEAF_H
#define SIGMA_SHEAF_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Report layouts accepted by [`ss_suite_report`].
 */
typedef enum SsEmit {
  SS_EMIT_MACHINE = 0,
  SS_EMIT_HUMAN = 1,
} SsEmit;

/**
 * Result codes shared by every function.
 */
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_NULL_POINTER = 1,
  SS_STATUS_INVALID_UTF8 = 2,
  SS_STATUS_CONFIG = 3,
  SS_STATUS_SUITE = 4,
  SS_STATUS_RECORD = 5,
  /**
   * The suite has not been run on this handle.
   */
  SS_STATUS_NOT_RUN = 6,
  SS_STATUS_PANIC = 7,
} SsStatus;

/**
 * A parsed configuration and, once run, its report.
 */
typedef struct SsSuite SsSuite;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 * Valid until the next call on the same thread.
 */
const char *ss_last_error(void);

/**
 * Parses TOML configuration text into a new handle.
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` a writable pointer.
 */
enum SsStatus ss_suite_new(const char *config, struct SsSuite **out);

/**
 * Runs the configured checks and stores the report on the handle.
 *
 * # Safety
 * `suite` must come from [`ss_suite_new`]; `passed` may be null.
 */
enum SsStatus ss_suite_run(struct SsSuite *suite, bool *passed);

/**
 * Renders the stored report. Release the string with [`ss_string_free`].
 *
 * # Safety
 * `suite` must come from [`ss_suite_new`] and `out` be a writable pointer.
 */
enum SsStatus ss_suite_report(const struct SsSuite *suite, enum SsEmit emit, char **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `suite` must come from [`ss_suite_new`] and not be used afterwards.
 */
void ss_suite_free(struct SsSuite *suite);

/**
 * Parses a one-line transcript record and runs the verifier it names.
 *
 * # Safety
 * `record` must be a NUL-terminated string and `accepted` a writable pointer.
 */
enum SsStatus ss_verify_record(const char *record, bool *accepted);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `text` must come from this library and not be used afterwards.
 */
void ss_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIGMA_SHEAF_H */
