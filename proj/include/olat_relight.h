/* Copyright (c) 2026 the olat-relight authors. */
/* SPDX-License-Identifier: Apache-2.0 */

/* C interface to the olat-relight core: OLAT reflectance-field relighting,
 * light-probe processing, dual-gamma calibration, exemplar-regularized
 * per-frame field estimation, and a Lambertian light-stage simulator.
 *
 * All objects are opaque handles created and destroyed by this library.
 * Functions return OLR_OK on success; on failure the out-parameters are
 * untouched and olr_last_error() carries a thread-local message. Handles are
 * immutable once created except through the explicit write calls, so sharing
 * them across threads for reads is safe.
 */

#ifndef OLAT_RELIGHT_H
#define OLAT_RELIGHT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum olr_status {
    OLR_OK = 0,
    OLR_ERR_INVALID_ARGUMENT = 1,
    OLR_ERR_IO = 2,
    OLR_ERR_FORMAT = 3,
    OLR_ERR_DIMENSION_MISMATCH = 4,
    OLR_ERR_NUMERIC = 5,
    OLR_ERR_UNKNOWN = 6
} olr_status;

typedef struct olr_image olr_image;           /* RGB radiance image */
typedef struct olr_mask olr_mask;             /* per-pixel weight in [0,1] */
typedef struct olr_footprints olr_footprints; /* per-basis angular footprints */
typedef struct olr_weights olr_weights;       /* per-basis RGB coefficients */
typedef struct olr_field olr_field;           /* ordered OLAT image stack */
typedef struct olr_exemplars olr_exemplars;   /* exemplar poses + relits */
typedef struct olr_manifest olr_manifest;     /* dataset description */

const char* olr_version(void);

/* Message of the most recent failure on this thread; empty string if none. */
const char* olr_last_error(void);

void olr_image_destroy(olr_image* img);
void olr_mask_destroy(olr_mask* mask);
void olr_footprints_destroy(olr_footprints* fp);
void olr_weights_destroy(olr_weights* w);
void olr_field_destroy(olr_field* field);
void olr_exemplars_destroy(olr_exemplars* ex);
void olr_manifest_destroy(olr_manifest* m);

/* ---- images and masks ------------------------------------------------- */

/* PFM or PNG by content on load, by extension (".pfm"/".png") on save. */
olr_status olr_image_load(const char* path, olr_image** out);
olr_status olr_image_save(const olr_image* img, const char* path);
olr_status olr_image_create(int width, int height, olr_image** out);
olr_status olr_image_dims(const olr_image* img, int* width, int* height);

/* Row-major, channel-interleaved RGB; count must be width*height*3. */
olr_status olr_image_read(const olr_image* img, double* dst, size_t count);
olr_status olr_image_write(olr_image* img, const double* src, size_t count);

olr_status olr_image_pad_resize(const olr_image* img, int width, int height,
                                olr_image** out);
olr_status olr_image_apply_mask(const olr_image* img, const olr_mask* mask,
                                olr_image** out);

olr_status olr_mask_load(const char* path, olr_mask** out);
olr_status olr_mask_save(const olr_mask* mask, const char* path);
olr_status olr_mask_create(int width, int height, double fill, olr_mask** out);
olr_status olr_mask_dims(const olr_mask* mask, int* width, int* height);

/* ---- light probes and projection -------------------------------------- */

/* Unwraps a mirror-ball photo to a 2:1 lat-long map. radius <= 0 selects the
 * largest circle inscribed in the image, centered. */
olr_status olr_mirrorball_unwrap(const olr_image* ball, double center_x,
                                 double center_y, double radius, int out_width,
                                 int out_height, olr_image** out);

/* Normalized footprints from per-basis lat-long probe images. */
olr_status olr_footprints_from_probes(const olr_image* const* probes, int count,
                                      double noise_floor, olr_footprints** out);
olr_status olr_footprints_count(const olr_footprints* fp, int* count);

/* env must be a 2:1 lat-long map matching the footprint dims. */
olr_status olr_project_environment(const olr_image* env,
                                   const olr_footprints* fp, olr_weights** out);

/* ---- lighting weights -------------------------------------------------- */

olr_status olr_weights_load(const char* path, olr_weights** out);
olr_status olr_weights_save(const olr_weights* w, const char* path);
/* rgb holds basis_count*3 values, or NULL for all-zero weights. */
olr_status olr_weights_create(int basis_count, const double* rgb,
                              olr_weights** out);
olr_status olr_weights_count(const olr_weights* w, int* count);
olr_status olr_weights_read(const olr_weights* w, double* rgb, size_t count);

/* ---- reflectance fields ------------------------------------------------ */

olr_status olr_field_load_dir(const char* dir, olr_field** out);
olr_status olr_field_save_dir(const olr_field* field, const char* dir);
olr_status olr_field_count(const olr_field* field, int* count);
olr_status olr_field_dims(const olr_field* field, int* width, int* height);
/* Copies basis image `index` out of the field. */
olr_status olr_field_get(const olr_field* field, int index, olr_image** out);
olr_status olr_field_from_images(const olr_image* const* images, int count,
                                 olr_field** out);

/* ---- dual gamma -------------------------------------------------------- */

olr_status olr_apply_dual_gamma(const olr_image* img, double gamma1,
                                double gamma2, olr_image** out);
olr_status olr_field_apply_dual_gamma(const olr_field* field, double gamma1,
                                      double gamma2, olr_field** out);

/* Fits (gamma1, gamma2) in [lo, hi]^2 so the gamma-encoded field, relit
 * under w, matches target in masked MSE. residual may be NULL. */
olr_status olr_fit_dual_gamma(const olr_field* field, const olr_weights* w,
                              const olr_image* target, const olr_mask* mask,
                              double lo, double hi, double* gamma1,
                              double* gamma2, double* residual);

/* ---- relighting and losses --------------------------------------------- */

olr_status olr_relight(const olr_field* field, const olr_weights* w,
                       olr_image** out);

olr_status olr_rendering_loss(const olr_image* relit, const olr_image* target,
                              const olr_mask* mask, double* out);
olr_status olr_reconstruction_loss(const olr_field* pred, const olr_field* gt,
                                   const olr_mask* mask, double* out);
/* gt may be NULL when lambda1 is 0. */
olr_status olr_combined_loss(const olr_field* pred, const olr_field* gt,
                             const olr_image* frame, const olr_weights* w,
                             const olr_mask* mask, double lambda1,
                             double lambda2, double* out);

olr_status olr_synth_tracking_frame(const olr_field* exemplar,
                                    const olr_weights* w, double gamma1,
                                    double gamma2, olr_image** out);

/* ---- per-frame estimation ---------------------------------------------- */

typedef struct olr_estimate_options {
    double lambda_prior;      /* exemplar-prior pull, default 0.1 */
    double blend_temperature; /* <= 0: auto */
    int iterations;           /* iterative solver budget, default 200 */
    double step_size;         /* <= 0: auto */
    int use_iterative;        /* 0: closed-form ridge (default) */
    double lambda1;           /* reconstruction weight, default 1 */
    double lambda2;           /* rendering weight, default 1 */
} olr_estimate_options;

void olr_estimate_options_init(olr_estimate_options* opts);

olr_status olr_exemplars_count(const olr_exemplars* ex, int* count);

typedef struct olr_frame_stats {
    double temperature;
    double residual_before; /* masked MSE of the prior's relight vs frame */
    double residual_after;  /* masked MSE of the estimate's relight vs frame */
} olr_frame_stats;

/* Estimates one frame's field. Optional outputs (pass NULL to skip):
 * blend must hold one value per exemplar pose; trace receives up to
 * trace_cap loss values with the real length in *trace_len. */
olr_status olr_estimate_frame(const olr_image* frame, const olr_mask* mask,
                              const olr_weights* w, const olr_exemplars* ex,
                              const olr_estimate_options* opts,
                              olr_field** out_field, double* blend,
                              double* trace, int trace_cap, int* trace_len,
                              olr_frame_stats* stats);

/* ---- dataset manifests ------------------------------------------------- */

olr_status olr_manifest_load(const char* path, olr_manifest** out);
olr_status olr_manifest_basis_count(const olr_manifest* m, int* count);
olr_status olr_manifest_dims(const olr_manifest* m, int* width, int* height);
olr_status olr_manifest_field(const olr_manifest* m, olr_field** out);
olr_status olr_manifest_footprints(const olr_manifest* m, double noise_floor,
                                   olr_footprints** out);
/* Fails if the manifest names no interview probe. */
olr_status olr_manifest_interview_probe(const olr_manifest* m, olr_image** out);
olr_status olr_manifest_exemplar_count(const olr_manifest* m, int* count);
/* Raw exemplar field for one pose, no gamma applied. */
olr_status olr_manifest_exemplar_field(const olr_manifest* m, int pose,
                                       olr_field** out);
/* All exemplar poses with the dual gamma applied; missing relit frames are
 * rendered under w. */
olr_status olr_manifest_exemplars(const olr_manifest* m, const olr_weights* w,
                                  double gamma1, double gamma2,
                                  olr_exemplars** out);

/* ---- light-stage simulator --------------------------------------------- */

typedef struct olr_sphere_scene {
    double albedo[3];
    double ambient[3];
    double radius_frac; /* of the image half-width */
    int width;
    int height;
} olr_sphere_scene;

void olr_sphere_scene_init(olr_sphere_scene* scene);

olr_status olr_render_olat(const olr_sphere_scene* scene, double theta,
                           double phi, olr_image** out);
/* env must be a 2:1 lat-long map. */
olr_status olr_render_env(const olr_sphere_scene* scene, const olr_image* env,
                          olr_image** out);
olr_status olr_sphere_mask(const olr_sphere_scene* scene, olr_mask** out);

typedef struct olr_simulate_options {
    olr_sphere_scene scene;
    int basis_count;
    int env_width;
    int env_height;
    int pose_count;
    int frame_count;
    uint32_t seed;
    double gamma1; /* camera curve baked into the frames */
    double gamma2;
} olr_simulate_options;

void olr_simulate_options_init(olr_simulate_options* opts);

/* Writes a complete synthetic dataset (OLATs, probes, interview environment,
 * frames, masks, exemplars, manifest.json) under out_dir. */
olr_status olr_simulate_dataset(const olr_simulate_options* opts,
                                const char* out_dir);

/* ---- diagnostics ------------------------------------------------------- */

/* Process-wide counters for soft clamps (negative file samples, over-range
 * gamma inputs). */
uint64_t olr_negative_clamp_count(void);
uint64_t olr_over_range_clamp_count(void);
void olr_reset_counters(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* OLAT_RELIGHT_H */
