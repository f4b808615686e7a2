#ifndef ECHOAUG_H
#define ECHOAUG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Result code of every fallible call.
 */
typedef enum EaStatus {
  EA_STATUS_OK = 0,
  EA_STATUS_NULL_POINTER = 1,
  EA_STATUS_INVALID_ARGUMENT = 2,
  EA_STATUS_IO = 3,
  EA_STATUS_PRESET_NOT_FOUND = 4,
  EA_STATUS_FAN_MASK_REQUIRED = 5,
  EA_STATUS_DIMENSION_MISMATCH = 6,
  EA_STATUS_EMPTY_MASK = 7,
  EA_STATUS_PANIC = 99,
} EaStatus;

/*
 Grayscale image with values in `[0, 1]`.
 */
typedef struct EaImage EaImage;

/*
 Binary mask.
 */
typedef struct EaMask EaMask;

/*
 Resolved augmentation pipeline.
 */
typedef struct EaPipeline EaPipeline;

/*
 Image with its LV mask and optional fan mask.
 */
typedef struct EaSample EaSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *ea_version(void);

/*
 Message describing the last failure on this thread, or NULL.
 The pointer stays valid until the next echoaug call on the same thread.
 */
const char *ea_last_error_message(void);

/*
 Builds an image from `width * height` 8-bit samples (row-major).

 # Safety
 `data` must point to `width * height` readable bytes; `out` must be writable.
 */
enum EaStatus ea_image_from_u8(const uint8_t *data,
                               size_t width,
                               size_t height,
                               struct EaImage **out);

/*
 Writes the image dimensions.

 # Safety
 `image` must be a live handle; `width` and `height` must be writable.
 */
enum EaStatus ea_image_dims(const struct EaImage *image, size_t *width, size_t *height);

/*
 Quantizes the image to 8 bits into `buf`, which must hold `width * height` bytes.

 # Safety
 `image` must be a live handle and `buf` must point to `len` writable bytes.
 */
enum EaStatus ea_image_to_u8(const struct EaImage *image, uint8_t *buf, size_t len);

/*
 # Safety
 `image` must be NULL or a handle not yet freed.
 */
void ea_image_free(struct EaImage *image);

/*
 Builds a mask from 8-bit samples; any nonzero byte is foreground.

 # Safety
 `data` must point to `width * height` readable bytes; `out` must be writable.
 */
enum EaStatus ea_mask_from_u8(const uint8_t *data,
                              size_t width,
                              size_t height,
                              struct EaMask **out);

/*
 Writes the mask as `{0, 1}` bytes into `buf`.

 # Safety
 `mask` must be a live handle and `buf` must point to `len` writable bytes.
 */
enum EaStatus ea_mask_to_u8(const struct EaMask *mask, uint8_t *buf, size_t len);

/*
 # Safety
 `mask` must be NULL or a handle not yet freed.
 */
void ea_mask_free(struct EaMask *mask);

/*
 Bundles copies of an image, its LV mask and an optional fan mask (`fan` may be NULL).

 # Safety
 `image` and `lv_mask` must be live handles, `fan` NULL or live, `out` writable.
 */
enum EaStatus ea_sample_new(const struct EaImage *image,
                            const struct EaMask *lv_mask,
                            const struct EaMask *fan,
                            struct EaSample **out);

/*
 Copies the sample's image into a new handle.

 # Safety
 `sample` must be a live handle and `out` writable.
 */
enum EaStatus ea_sample_image(const struct EaSample *sample, struct EaImage **out);

/*
 Copies the sample's LV mask into a new handle.

 # Safety
 `sample` must be a live handle and `out` writable.
 */
enum EaStatus ea_sample_lv_mask(const struct EaSample *sample, struct EaMask **out);

/*
 # Safety
 `sample` must be NULL or a handle not yet freed.
 */
void ea_sample_free(struct EaSample *sample);

/*
 Parses a pipeline JSON document and resolves it against the built-in presets.

 # Safety
 `json` must be a NUL-terminated UTF-8 string; `out` must be writable.
 */
enum EaStatus ea_pipeline_from_json(const char *json, struct EaPipeline **out);

/*
 Applies the pipeline to a sample; `sample_index` selects the random streams.

 # Safety
 `pipeline` and `sample` must be live handles and `out` writable.
 */
enum EaStatus ea_pipeline_apply(const struct EaPipeline *pipeline,
                                const struct EaSample *sample,
                                uint64_t sample_index,
                                struct EaSample **out);

/*
 # Safety
 `pipeline` must be NULL or a handle not yet freed.
 */
void ea_pipeline_free(struct EaPipeline *pipeline);

/*
 Extracts the fan sector of an image with the default morphology settings.

 # Safety
 `image` must be a live handle and `out` writable.
 */
enum EaStatus ea_fan_mask_extract(const struct EaImage *image, struct EaMask **out);

/*
 Dice coefficient of two masks; two empty masks score 1.

 # Safety
 `pred` and `truth` must be live handles and `out` writable.
 */
enum EaStatus ea_dice(const struct EaMask *pred, const struct EaMask *truth, double *out);

/*
 Intersection over union of two masks; two empty masks score 1.

 # Safety
 `pred` and `truth` must be live handles and `out` writable.
 */
enum EaStatus ea_iou(const struct EaMask *pred, const struct EaMask *truth, double *out);

/*
 The built-in preset registry as JSON. Release with [`ea_string_free`].

 # Safety
 `out` must be writable.
 */
enum EaStatus ea_registry_json(char **out);

/*
 # Safety
 `s` must be NULL or a string returned by this library and not yet freed.
 */
void ea_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ECHOAUG_H */
