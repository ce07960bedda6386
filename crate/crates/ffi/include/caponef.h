#ifndef CAPONEF_H
#define CAPONEF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Number of values written by [`cpf_extract_features`].
 */
#define CPF_FEATURE_COUNT 10

typedef enum CpfStatus {
  CPF_STATUS_OK = 0,
  CPF_STATUS_NULL_POINTER = 1,
  CPF_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The input is valid but the quantity is undefined for it.
   */
  CPF_STATUS_DEGENERATE = 3,
  CPF_STATUS_PARSE_ERROR = 4,
  CPF_STATUS_IO_ERROR = 5,
  CPF_STATUS_BUFFER_TOO_SMALL = 6,
  CPF_STATUS_PANIC = 7,
} CpfStatus;

/**
 * Trained random forest.
 */
typedef struct CpfForest CpfForest;

/**
 * Message describing the last failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cpf_last_error_message(void);

/**
 * Computes P1..P10 of a real sequence into `out[0..10]`.
 *
 * # Safety
 * `samples` must point to `n` readable doubles and `out` to
 * `CPF_FEATURE_COUNT` writable doubles.
 */
enum CpfStatus cpf_extract_features(const double *samples, size_t n, double *out);

/**
 * Writes `len` real trans-noise levels for frame `frame_index`.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum CpfStatus cpf_transnoise(size_t frame_index, size_t len, double *out);

/**
 * Error-phase sequence of one synchronised frame against the etalon.
 * `frame` and `etalon` hold `len` interleaved complex samples each;
 * `out` receives `len` phases in (-pi, pi].
 *
 * # Safety
 * `frame` and `etalon` must point to `2 * len` readable doubles and `out`
 * to `len` writable doubles.
 */
enum CpfStatus cpf_error_phase(const double *frame, const double *etalon, size_t len, double *out);

/**
 * Two-sided p-value of a correlation `r` over `n` samples. |r| = 1 gives
 * `Degenerate` with `*out = 0`.
 *
 * # Safety
 * `out` must point to one writable double.
 */
enum CpfStatus cpf_pvalue_two_sided(double r, size_t n, double *out);

/**
 * Parses a model in the text format written by `caponef train-eval`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer slot.
 */
enum CpfStatus cpf_forest_from_string(const char *text, struct CpfForest **out);

/**
 * Loads a model file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer slot.
 */
enum CpfStatus cpf_forest_load(const char *path, struct CpfForest **out);

/**
 * Releases a forest. NULL is ignored.
 *
 * # Safety
 * `forest` must come from `cpf_forest_load` or `cpf_forest_from_string`
 * and must not be used afterwards.
 */
void cpf_forest_free(struct CpfForest *forest);

/**
 * # Safety
 * `forest` must be a live handle and `out` writable.
 */
enum CpfStatus cpf_forest_n_features(const struct CpfForest *forest, size_t *out);

/**
 * # Safety
 * `forest` must be a live handle and `out` writable.
 */
enum CpfStatus cpf_forest_n_classes(const struct CpfForest *forest, size_t *out);

/**
 * Class labels in ascending order; `predict_proba` follows this order.
 *
 * # Safety
 * `forest` must be a live handle and `out` must hold `capacity` writable
 * values.
 */
enum CpfStatus cpf_forest_classes(const struct CpfForest *forest, uint32_t *out, size_t capacity);

/**
 * Predicted label for one feature row.
 *
 * # Safety
 * `forest` must be a live handle, `x` must point to `n` readable doubles
 * and `out` must be writable.
 */
enum CpfStatus cpf_forest_predict(const struct CpfForest *forest,
                                  const double *x,
                                  size_t n,
                                  uint32_t *out);

/**
 * Class probabilities for one feature row, in `cpf_forest_classes` order.
 *
 * # Safety
 * `forest` must be a live handle, `x` must point to `n` readable doubles
 * and `out` must hold `capacity` writable doubles.
 */
enum CpfStatus cpf_forest_predict_proba(const struct CpfForest *forest,
                                        const double *x,
                                        size_t n,
                                        double *out,
                                        size_t capacity);

/**
 * Normalised impurity importances, one per model feature.
 *
 * # Safety
 * `forest` must be a live handle and `out` must hold `capacity` writable
 * doubles.
 */
enum CpfStatus cpf_forest_importances(const struct CpfForest *forest, double *out, size_t capacity);

#endif  /* CAPONEF_H */
