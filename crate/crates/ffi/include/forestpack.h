#ifndef FORESTPACK_H
#define FORESTPACK_H

#pragma once

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum FpStatus {
  FP_STATUS_OK = 0,
  FP_STATUS_NULL_POINTER = 1,
  FP_STATUS_INVALID_ARGUMENT = 2,
  FP_STATUS_PARSE = 3,
  FP_STATUS_PRECONDITION = 4,
  FP_STATUS_IO = 5,
  FP_STATUS_PANIC = 6,
} FpStatus;

typedef enum FpMode {
  FP_MODE_EXACT = 0,
  FP_MODE_SPANNING = 1,
  FP_MODE_DECOMPOSE = 2,
} FpMode;

/**
 * A parsed graph together with its terminal groups.
 */
typedef struct FpInstance FpInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *fp_last_error(void);

/**
 * Parses the text graph format into a new instance.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FpStatus fp_instance_parse(const char *text, struct FpInstance **out);

/**
 * Releases an instance. Null is ignored.
 *
 * # Safety
 * `inst` must come from [`fp_instance_parse`] and not be used afterwards.
 */
void fp_instance_free(struct FpInstance *inst);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void fp_string_free(char *s);

/**
 * Vertex, edge and group counts.
 *
 * # Safety
 * All pointers must be valid.
 */
enum FpStatus fp_instance_sizes(const struct FpInstance *inst,
                                size_t *vertices,
                                size_t *edges,
                                size_t *groups);

/**
 * Steiner edge-connectivity of one terminal group.
 *
 * # Safety
 * All pointers must be valid.
 */
enum FpStatus fp_steiner_connectivity(const struct FpInstance *inst, size_t group, uint64_t *out);

/**
 * Packs `k` classes and writes a JSON report with `verdict`, `packing`
 * and `passed`. A budget of 0 means unlimited.
 *
 * # Safety
 * All pointers must be valid; free `*out_json` with [`fp_string_free`].
 */
enum FpStatus fp_pack(const struct FpInstance *inst,
                      size_t k,
                      enum FpMode mode,
                      uint64_t budget,
                      char **out_json);

/**
 * Checks a packing given as JSON (the `packing` field of an [`fp_pack`]
 * report) against the instance.
 *
 * # Safety
 * All pointers must be valid.
 */
enum FpStatus fp_verify(const struct FpInstance *inst, const char *packing_json, bool *passed);

/**
 * Builds the extension counterexample and writes its bottleneck report.
 *
 * # Safety
 * `out_json` must be valid; free `*out_json` with [`fp_string_free`].
 */
enum FpStatus fp_counterexample(size_t q, size_t k, uint64_t seed, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORESTPACK_H */
