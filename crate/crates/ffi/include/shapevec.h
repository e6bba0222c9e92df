#ifndef SHAPEVEC_H
#define SHAPEVEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum ShapevecStatus {
  SHAPEVEC_STATUS_OK = 0,
  SHAPEVEC_STATUS_NULL_POINTER = 1,
  SHAPEVEC_STATUS_INVALID_ARGUMENT = 2,
  SHAPEVEC_STATUS_EMPTY_SHAPE = 3,
  SHAPEVEC_STATUS_CENTER_OUTSIDE = 4,
  SHAPEVEC_STATUS_DIMENSION_MISMATCH = 5,
  SHAPEVEC_STATUS_INVALID_CONTOUR = 6,
  SHAPEVEC_STATUS_DEGENERATE = 7,
  SHAPEVEC_STATUS_TOO_MANY_COEFFICIENTS = 8,
  SHAPEVEC_STATUS_SINGULAR_FIT = 9,
  SHAPEVEC_STATUS_PARSE = 10,
  SHAPEVEC_STATUS_IO = 11,
  SHAPEVEC_STATUS_PANIC = 12,
} ShapevecStatus;

typedef enum ShapevecBasis {
  SHAPEVEC_BASIS_CHEBYSHEV = 0,
  SHAPEVEC_BASIS_FOURIER_FREE = 1,
  SHAPEVEC_BASIS_FOURIER_FIXED = 2,
  SHAPEVEC_BASIS_MONOMIAL = 3,
} ShapevecBasis;

/**
 * Batch decoder handle bound to one basis, length and point count.
 */
typedef struct ShapevecDecoder ShapevecDecoder;

/**
 * Binary mask handle.
 */
typedef struct ShapevecMask ShapevecMask;

/**
 * Shape vector handle.
 */
typedef struct ShapevecVector ShapevecVector;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a
 * success. Valid until the next call on the same thread.
 */
const char *shapevec_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *shapevec_version(void);

/**
 * Creates a `width × height` mask from row-major bytes (non-zero =
 * foreground).
 */
enum ShapevecStatus shapevec_mask_new(size_t width,
                                      size_t height,
                                      const uint8_t *pixels,
                                      struct ShapevecMask **out);

/**
 * Reads a PBM (P4) or PNG mask.
 */
enum ShapevecStatus shapevec_mask_read(const char *path, struct ShapevecMask **out);

/**
 * Writes a mask as binary PBM.
 */
enum ShapevecStatus shapevec_mask_write_pbm(const struct ShapevecMask *mask, const char *path);

enum ShapevecStatus shapevec_mask_size(const struct ShapevecMask *mask,
                                       size_t *width,
                                       size_t *height);

/**
 * Copies the mask into `pixels` (row-major, 1 = foreground), which must
 * hold `width × height` bytes.
 */
enum ShapevecStatus shapevec_mask_pixels(const struct ShapevecMask *mask,
                                         uint8_t *pixels,
                                         size_t len);

void shapevec_mask_free(struct ShapevecMask *mask);

/**
 * Intersection over union of two masks of equal size.
 */
enum ShapevecStatus shapevec_iou(const struct ShapevecMask *a,
                                 const struct ShapevecMask *b,
                                 double *out);

/**
 * Encodes a mask (`basis` is a [`ShapevecBasis`] value): inner center, IR signature at step `tau` radians, and
 * an `l`-coefficient fit in `basis`.
 */
enum ShapevecStatus shapevec_encode(const struct ShapevecMask *mask,
                                    uint32_t basis,
                                    size_t l,
                                    double tau,
                                    bool normalize,
                                    struct ShapevecVector **out);

/**
 * Builds a shape vector from raw parts (`basis` is a [`ShapevecBasis`]
 * value). `scale <= 0` means unnormalized.
 */
enum ShapevecStatus shapevec_vector_new(double cx,
                                        double cy,
                                        uint32_t basis,
                                        const double *coeffs,
                                        size_t len,
                                        double scale,
                                        struct ShapevecVector **out);

/**
 * Parses a shape vector from its JSON form.
 */
enum ShapevecStatus shapevec_vector_from_json(const char *json, struct ShapevecVector **out);

/**
 * JSON form of a shape vector; release with [`shapevec_string_free`].
 * Returns null if `v` is null.
 */
char *shapevec_vector_to_json(const struct ShapevecVector *v);

void shapevec_string_free(char *s);

/**
 * Basis, coefficient count, center and scale (0 when unnormalized).
 */
enum ShapevecStatus shapevec_vector_info(const struct ShapevecVector *v,
                                         enum ShapevecBasis *basis,
                                         size_t *len,
                                         double *cx,
                                         double *cy,
                                         double *scale);

/**
 * Copies the `len` coefficients into `out`.
 */
enum ShapevecStatus shapevec_vector_coeffs(const struct ShapevecVector *v, double *out, size_t len);

void shapevec_vector_free(struct ShapevecVector *v);

/**
 * Decodes one vector into `2 × points` coordinates (xs then ys).
 */
enum ShapevecStatus shapevec_decode_one(const struct ShapevecVector *v,
                                        size_t points,
                                        double *out,
                                        size_t len);

/**
 * Squared norm of the concatenated center and coefficient residuals.
 */
enum ShapevecStatus shapevec_shape_loss(const struct ShapevecVector *pred,
                                        const struct ShapevecVector *truth,
                                        double *out);

/**
 * Precomputes the angle grid and basis matrix for batches of `l`
 * coefficients in `basis` (a [`ShapevecBasis`] value) decoded at
 * `points` angles.
 */
enum ShapevecStatus shapevec_decoder_new(uint32_t basis,
                                         size_t l,
                                         size_t points,
                                         struct ShapevecDecoder **out);

/**
 * Decodes `bs` shapes. `coeffs` is `bs × l` row-major, `centers` is
 * `bs × 2` (x, y), `scales` is `bs` values or null for all 1, and `out`
 * receives `bs × 2 × points` values.
 */
enum ShapevecStatus shapevec_decoder_decode(const struct ShapevecDecoder *decoder,
                                            size_t bs,
                                            const double *coeffs,
                                            const double *centers,
                                            const double *scales,
                                            double *out,
                                            size_t out_len);

void shapevec_decoder_free(struct ShapevecDecoder *decoder);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHAPEVEC_H */
