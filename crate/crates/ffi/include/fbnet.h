#ifndef FBNET_H
#define FBNET_H

/* This header is generated by cbindgen from fbnet-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Success.
#define FBN_OK 0

// A required pointer argument was null.
#define FBN_ERR_NULL -1

// A string argument was not valid UTF-8.
#define FBN_ERR_UTF8 -2

// The bundle could not be read or parsed.
#define FBN_ERR_BUNDLE -3

// An input value or length did not match the model.
#define FBN_ERR_INPUT -4

// The provided buffer is too small.
#define FBN_ERR_BUFFER -5

// An index argument is out of range.
#define FBN_ERR_RANGE -6

// Opaque engine handle; create with [`fbn_engine_open`], destroy with
// [`fbn_engine_free`].
typedef struct FbnEngine FbnEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the current thread's last error message (NUL-terminated) into
// `buf` and returns its length in bytes (excluding the NUL), 0 when no
// error is stored, or `FBN_ERR_BUFFER`/`FBN_ERR_NULL`.
//
// # Safety
// `buf` must point to `cap` writable bytes when `cap > 0`.
int32_t fbn_last_error(char *buf, size_t cap);

// Library version as a static NUL-terminated string; never freed.
const char *fbn_version(void);

// Loads a model bundle directory. Returns null on failure; call
// [`fbn_last_error`] for the reason.
//
// # Safety
// `bundle_dir` must be a NUL-terminated string.
struct FbnEngine *fbn_engine_open(const char *bundle_dir);

// Frees an engine handle. Null is a no-op.
//
// # Safety
// `engine` must have come from [`fbn_engine_open`] and not been freed.
void fbn_engine_free(struct FbnEngine *engine);

// Number of output grades, or a negative error code.
//
// # Safety
// `engine` must be a live handle from [`fbn_engine_open`].
int32_t fbn_engine_num_grades(const struct FbnEngine *engine);

// Number of raw input scores one record carries, or a negative error
// code.
//
// # Safety
// `engine` must be a live handle from [`fbn_engine_open`].
int32_t fbn_engine_num_inputs(const struct FbnEngine *engine);

// Copies the label of grade `index` (lowest grade is 0) into `buf`
// NUL-terminated, returning its length or a negative error code.
//
// # Safety
// `engine` must be a live handle; `buf` must point to `cap` writable
// bytes.
int32_t fbn_engine_grade_label(const struct FbnEngine *engine, size_t index, char *buf, size_t cap);

// Copies the name of input column `index` (the order `fbn_engine_infer`
// expects) into `buf` NUL-terminated, returning its length or a negative
// error code.
//
// # Safety
// `engine` must be a live handle; `buf` must point to `cap` writable
// bytes.
int32_t fbn_engine_input_name(const struct FbnEngine *engine, size_t index, char *buf, size_t cap);

// Grades one record. `scores` holds `n_scores` raw values in input-column
// order; the posterior is written to `probs_out` (one probability per
// grade, lowest first) when it is non-null. Returns the predicted grade
// index, or a negative error code.
//
// # Safety
// `engine` must be a live handle; `scores` must point to `n_scores`
// readable doubles; `probs_out`, when non-null, must point to
// `probs_cap` writable doubles.
int32_t fbn_engine_infer(const struct FbnEngine *engine,
                         const double *scores,
                         size_t n_scores,
                         double *probs_out,
                         size_t probs_cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FBNET_H */
