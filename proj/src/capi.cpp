// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#include "olat_relight.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "olat/dataset.hpp"
#include "olat/estimate.hpp"
#include "olat/gamma.hpp"
#include "olat/image.hpp"
#include "olat/manifest.hpp"
#include "olat/probe.hpp"
#include "olat/relight.hpp"
#include "olat/stagesim.hpp"

// Opaque handle definitions: thin wrappers over the core types.
struct olr_image {
    olat::ImageF v;
};
struct olr_mask {
    olat::MaskImage v;
};
struct olr_footprints {
    std::vector<olat::BasisFootprint> v;
};
struct olr_weights {
    olat::LightingWeights v;
};
struct olr_field {
    olat::ReflectanceField v;
};
struct olr_exemplars {
    olat::ExemplarSet v;
};
struct olr_manifest {
    olat::DatasetManifest v;
};

namespace {

thread_local std::string t_error;

olr_status map_code(olat::ErrorCode code)
{
    switch (code) {
    case olat::ErrorCode::InvalidArgument: return OLR_ERR_INVALID_ARGUMENT;
    case olat::ErrorCode::Io: return OLR_ERR_IO;
    case olat::ErrorCode::Format: return OLR_ERR_FORMAT;
    case olat::ErrorCode::DimensionMismatch: return OLR_ERR_DIMENSION_MISMATCH;
    case olat::ErrorCode::Numeric: return OLR_ERR_NUMERIC;
    }
    return OLR_ERR_UNKNOWN;
}

// Runs fn, translating exceptions into status codes + the thread-local
// message. No exception may cross the C boundary.
template <typename Fn> olr_status guard(Fn&& fn)
{
    try {
        fn();
        t_error.clear();
        return OLR_OK;
    } catch (const olat::Error& e) {
        t_error = e.what();
        return map_code(e.code());
    } catch (const std::bad_alloc&) {
        t_error = "out of memory";
        return OLR_ERR_UNKNOWN;
    } catch (const std::exception& e) {
        t_error = e.what();
        return OLR_ERR_UNKNOWN;
    } catch (...) {
        t_error = "unknown error";
        return OLR_ERR_UNKNOWN;
    }
}

olr_status bad_arg(const char* msg)
{
    t_error = msg;
    return OLR_ERR_INVALID_ARGUMENT;
}

olat::SphereScene to_scene(const olr_sphere_scene& s)
{
    olat::SphereScene scene;
    scene.albedo = {s.albedo[0], s.albedo[1], s.albedo[2]};
    scene.ambient = {s.ambient[0], s.ambient[1], s.ambient[2]};
    scene.radius_frac = s.radius_frac;
    scene.dims = {s.width, s.height};
    return scene;
}

} // namespace

extern "C" {

const char* olr_version(void) { return "0.1.0"; }

const char* olr_last_error(void) { return t_error.c_str(); }

void olr_image_destroy(olr_image* img) { delete img; }
void olr_mask_destroy(olr_mask* mask) { delete mask; }
void olr_footprints_destroy(olr_footprints* fp) { delete fp; }
void olr_weights_destroy(olr_weights* w) { delete w; }
void olr_field_destroy(olr_field* field) { delete field; }
void olr_exemplars_destroy(olr_exemplars* ex) { delete ex; }
void olr_manifest_destroy(olr_manifest* m) { delete m; }

/* ---- images and masks ------------------------------------------------- */

olr_status olr_image_load(const char* path, olr_image** out)
{
    if (!path || !out)
        return bad_arg("olr_image_load: null argument");
    return guard([&] { *out = new olr_image{olat::load_image(path)}; });
}

olr_status olr_image_save(const olr_image* img, const char* path)
{
    if (!img || !path)
        return bad_arg("olr_image_save: null argument");
    return guard([&] { olat::save_image(img->v, path); });
}

olr_status olr_image_create(int width, int height, olr_image** out)
{
    if (!out)
        return bad_arg("olr_image_create: null argument");
    return guard([&] { *out = new olr_image{olat::ImageF(width, height)}; });
}

olr_status olr_image_dims(const olr_image* img, int* width, int* height)
{
    if (!img || !width || !height)
        return bad_arg("olr_image_dims: null argument");
    *width = img->v.width();
    *height = img->v.height();
    return OLR_OK;
}

olr_status olr_image_read(const olr_image* img, double* dst, size_t count)
{
    if (!img || !dst)
        return bad_arg("olr_image_read: null argument");
    if (count != img->v.value_count())
        return bad_arg("olr_image_read: count must be width*height*3");
    std::memcpy(dst, img->v.data(), count * sizeof(double));
    return OLR_OK;
}

olr_status olr_image_write(olr_image* img, const double* src, size_t count)
{
    if (!img || !src)
        return bad_arg("olr_image_write: null argument");
    if (count != img->v.value_count())
        return bad_arg("olr_image_write: count must be width*height*3");
    std::memcpy(img->v.data(), src, count * sizeof(double));
    return OLR_OK;
}

olr_status olr_image_pad_resize(const olr_image* img, int width, int height,
                                olr_image** out)
{
    if (!img || !out)
        return bad_arg("olr_image_pad_resize: null argument");
    return guard([&] {
        *out = new olr_image{olat::pad_and_resize(img->v, {width, height})};
    });
}

olr_status olr_image_apply_mask(const olr_image* img, const olr_mask* mask,
                                olr_image** out)
{
    if (!img || !mask || !out)
        return bad_arg("olr_image_apply_mask: null argument");
    return guard([&] { *out = new olr_image{olat::apply_mask(img->v, mask->v)}; });
}

olr_status olr_mask_load(const char* path, olr_mask** out)
{
    if (!path || !out)
        return bad_arg("olr_mask_load: null argument");
    return guard([&] { *out = new olr_mask{olat::load_mask(path)}; });
}

olr_status olr_mask_save(const olr_mask* mask, const char* path)
{
    if (!mask || !path)
        return bad_arg("olr_mask_save: null argument");
    return guard([&] { olat::save_mask(mask->v, path); });
}

olr_status olr_mask_create(int width, int height, double fill, olr_mask** out)
{
    if (!out)
        return bad_arg("olr_mask_create: null argument");
    return guard(
        [&] { *out = new olr_mask{olat::MaskImage(width, height, fill)}; });
}

olr_status olr_mask_dims(const olr_mask* mask, int* width, int* height)
{
    if (!mask || !width || !height)
        return bad_arg("olr_mask_dims: null argument");
    *width = mask->v.width();
    *height = mask->v.height();
    return OLR_OK;
}

/* ---- light probes and projection -------------------------------------- */

olr_status olr_mirrorball_unwrap(const olr_image* ball, double center_x,
                                 double center_y, double radius, int out_width,
                                 int out_height, olr_image** out)
{
    if (!ball || !out)
        return bad_arg("olr_mirrorball_unwrap: null argument");
    return guard([&] {
        olat::MirrorBall mb;
        mb.image = ball->v;
        if (radius <= 0.0) {
            mb.center_x = ball->v.width() / 2.0;
            mb.center_y = ball->v.height() / 2.0;
            mb.radius = std::min(ball->v.width(), ball->v.height()) / 2.0;
        } else {
            mb.center_x = center_x;
            mb.center_y = center_y;
            mb.radius = radius;
        }
        *out = new olr_image{
            olat::mirrorball_to_latlong(mb, {out_width, out_height}).image()};
    });
}

olr_status olr_footprints_from_probes(const olr_image* const* probes, int count,
                                      double noise_floor, olr_footprints** out)
{
    if (!probes || !out || count < 1)
        return bad_arg("olr_footprints_from_probes: null argument or count < 1");
    for (int i = 0; i < count; ++i)
        if (!probes[i])
            return bad_arg("olr_footprints_from_probes: null probe");
    return guard([&] {
        auto fp = std::make_unique<olr_footprints>();
        fp->v.reserve(std::size_t(count));
        for (int i = 0; i < count; ++i)
            fp->v.push_back(olat::footprint_from_probe(
                olat::LatLongMap(probes[i]->v), noise_floor));
        *out = fp.release();
    });
}

olr_status olr_footprints_count(const olr_footprints* fp, int* count)
{
    if (!fp || !count)
        return bad_arg("olr_footprints_count: null argument");
    *count = int(fp->v.size());
    return OLR_OK;
}

olr_status olr_project_environment(const olr_image* env,
                                   const olr_footprints* fp, olr_weights** out)
{
    if (!env || !fp || !out)
        return bad_arg("olr_project_environment: null argument");
    return guard([&] {
        *out = new olr_weights{
            olat::project_environment(olat::LatLongMap(env->v), fp->v)};
    });
}

/* ---- lighting weights -------------------------------------------------- */

olr_status olr_weights_load(const char* path, olr_weights** out)
{
    if (!path || !out)
        return bad_arg("olr_weights_load: null argument");
    return guard([&] { *out = new olr_weights{olat::load_weights(path)}; });
}

olr_status olr_weights_save(const olr_weights* w, const char* path)
{
    if (!w || !path)
        return bad_arg("olr_weights_save: null argument");
    return guard([&] { olat::save_weights(w->v, path); });
}

olr_status olr_weights_create(int basis_count, const double* rgb,
                              olr_weights** out)
{
    if (!out || basis_count < 1)
        return bad_arg("olr_weights_create: null argument or basis_count < 1");
    return guard([&] {
        auto w = std::make_unique<olr_weights>();
        w->v = olat::LightingWeights::zero(basis_count);
        if (rgb)
            for (int k = 0; k < basis_count; ++k)
                for (int c = 0; c < 3; ++c)
                    w->v.values[std::size_t(k)][std::size_t(c)] =
                        rgb[std::size_t(k) * 3 + std::size_t(c)];
        *out = w.release();
    });
}

olr_status olr_weights_count(const olr_weights* w, int* count)
{
    if (!w || !count)
        return bad_arg("olr_weights_count: null argument");
    *count = w->v.basis_count();
    return OLR_OK;
}

olr_status olr_weights_read(const olr_weights* w, double* rgb, size_t count)
{
    if (!w || !rgb)
        return bad_arg("olr_weights_read: null argument");
    if (count != std::size_t(w->v.basis_count()) * 3)
        return bad_arg("olr_weights_read: count must be basis_count*3");
    for (int k = 0; k < w->v.basis_count(); ++k)
        for (int c = 0; c < 3; ++c)
            rgb[std::size_t(k) * 3 + std::size_t(c)] =
                w->v.values[std::size_t(k)][std::size_t(c)];
    return OLR_OK;
}

/* ---- reflectance fields ------------------------------------------------ */

olr_status olr_field_load_dir(const char* dir, olr_field** out)
{
    if (!dir || !out)
        return bad_arg("olr_field_load_dir: null argument");
    return guard([&] { *out = new olr_field{olat::load_field_dir(dir)}; });
}

olr_status olr_field_save_dir(const olr_field* field, const char* dir)
{
    if (!field || !dir)
        return bad_arg("olr_field_save_dir: null argument");
    return guard([&] { olat::save_field_dir(field->v, dir); });
}

olr_status olr_field_count(const olr_field* field, int* count)
{
    if (!field || !count)
        return bad_arg("olr_field_count: null argument");
    *count = field->v.count();
    return OLR_OK;
}

olr_status olr_field_dims(const olr_field* field, int* width, int* height)
{
    if (!field || !width || !height)
        return bad_arg("olr_field_dims: null argument");
    *width = field->v.dims().width;
    *height = field->v.dims().height;
    return OLR_OK;
}

olr_status olr_field_get(const olr_field* field, int index, olr_image** out)
{
    if (!field || !out)
        return bad_arg("olr_field_get: null argument");
    if (index < 0 || index >= field->v.count())
        return bad_arg("olr_field_get: index out of range");
    return guard(
        [&] { *out = new olr_image{field->v.olats[std::size_t(index)]}; });
}

olr_status olr_field_from_images(const olr_image* const* images, int count,
                                 olr_field** out)
{
    if (!images || !out || count < 1)
        return bad_arg("olr_field_from_images: null argument or count < 1");
    for (int i = 0; i < count; ++i)
        if (!images[i])
            return bad_arg("olr_field_from_images: null image");
    return guard([&] {
        auto field = std::make_unique<olr_field>();
        field->v.olats.reserve(std::size_t(count));
        for (int i = 0; i < count; ++i)
            field->v.olats.push_back(images[i]->v);
        field->v.validate();
        *out = field.release();
    });
}

/* ---- dual gamma -------------------------------------------------------- */

olr_status olr_apply_dual_gamma(const olr_image* img, double gamma1,
                                double gamma2, olr_image** out)
{
    if (!img || !out)
        return bad_arg("olr_apply_dual_gamma: null argument");
    return guard([&] {
        *out = new olr_image{olat::apply_dual_gamma(img->v, {gamma1, gamma2})};
    });
}

olr_status olr_field_apply_dual_gamma(const olr_field* field, double gamma1,
                                      double gamma2, olr_field** out)
{
    if (!field || !out)
        return bad_arg("olr_field_apply_dual_gamma: null argument");
    return guard([&] {
        *out = new olr_field{olat::apply_dual_gamma(field->v, {gamma1, gamma2})};
    });
}

olr_status olr_fit_dual_gamma(const olr_field* field, const olr_weights* w,
                              const olr_image* target, const olr_mask* mask,
                              double lo, double hi, double* gamma1,
                              double* gamma2, double* residual)
{
    if (!field || !w || !target || !mask || !gamma1 || !gamma2)
        return bad_arg("olr_fit_dual_gamma: null argument");
    return guard([&] {
        olat::GammaFitOptions opts;
        opts.lo = lo;
        opts.hi = hi;
        const olat::GammaFitResult res =
            olat::fit_dual_gamma(field->v, w->v, target->v, mask->v, opts);
        *gamma1 = res.gamma.gamma1;
        *gamma2 = res.gamma.gamma2;
        if (residual)
            *residual = res.residual;
    });
}

/* ---- relighting and losses --------------------------------------------- */

olr_status olr_relight(const olr_field* field, const olr_weights* w,
                       olr_image** out)
{
    if (!field || !w || !out)
        return bad_arg("olr_relight: null argument");
    return guard([&] { *out = new olr_image{olat::relight(field->v, w->v)}; });
}

olr_status olr_rendering_loss(const olr_image* relit, const olr_image* target,
                              const olr_mask* mask, double* out)
{
    if (!relit || !target || !mask || !out)
        return bad_arg("olr_rendering_loss: null argument");
    return guard(
        [&] { *out = olat::rendering_loss(relit->v, target->v, mask->v); });
}

olr_status olr_reconstruction_loss(const olr_field* pred, const olr_field* gt,
                                   const olr_mask* mask, double* out)
{
    if (!pred || !gt || !mask || !out)
        return bad_arg("olr_reconstruction_loss: null argument");
    return guard(
        [&] { *out = olat::reconstruction_loss(pred->v, gt->v, mask->v); });
}

olr_status olr_combined_loss(const olr_field* pred, const olr_field* gt,
                             const olr_image* frame, const olr_weights* w,
                             const olr_mask* mask, double lambda1,
                             double lambda2, double* out)
{
    if (!pred || !frame || !w || !mask || !out)
        return bad_arg("olr_combined_loss: null argument");
    return guard([&] {
        std::optional<olat::ReflectanceField> gt_field;
        if (gt)
            gt_field = gt->v;
        *out = olat::combined_loss(pred->v, gt_field, frame->v, w->v, mask->v,
                                   {lambda1, lambda2});
    });
}

olr_status olr_synth_tracking_frame(const olr_field* exemplar,
                                    const olr_weights* w, double gamma1,
                                    double gamma2, olr_image** out)
{
    if (!exemplar || !w || !out)
        return bad_arg("olr_synth_tracking_frame: null argument");
    return guard([&] {
        *out = new olr_image{
            olat::synth_tracking_frame(exemplar->v, w->v, {gamma1, gamma2})};
    });
}

/* ---- per-frame estimation ---------------------------------------------- */

void olr_estimate_options_init(olr_estimate_options* opts)
{
    if (!opts)
        return;
    const olat::EstimationConfig defaults;
    opts->lambda_prior = defaults.lambda_prior;
    opts->blend_temperature = defaults.blend_temperature;
    opts->iterations = defaults.iterations;
    opts->step_size = defaults.step_size;
    opts->use_iterative = 0;
    opts->lambda1 = defaults.loss_weights.lambda1;
    opts->lambda2 = defaults.loss_weights.lambda2;
}

olr_status olr_exemplars_count(const olr_exemplars* ex, int* count)
{
    if (!ex || !count)
        return bad_arg("olr_exemplars_count: null argument");
    *count = ex->v.count();
    return OLR_OK;
}

olr_status olr_estimate_frame(const olr_image* frame, const olr_mask* mask,
                              const olr_weights* w, const olr_exemplars* ex,
                              const olr_estimate_options* opts,
                              olr_field** out_field, double* blend,
                              double* trace, int trace_cap, int* trace_len,
                              olr_frame_stats* stats)
{
    if (!frame || !mask || !w || !ex || !opts || !out_field)
        return bad_arg("olr_estimate_frame: null argument");
    return guard([&] {
        olat::EstimationConfig cfg;
        cfg.lambda_prior = opts->lambda_prior;
        cfg.blend_temperature = opts->blend_temperature;
        cfg.iterations = opts->iterations;
        cfg.step_size = opts->step_size;
        cfg.solver = opts->use_iterative ? olat::EstimateSolver::Iterative
                                         : olat::EstimateSolver::Ridge;
        cfg.loss_weights = {opts->lambda1, opts->lambda2};
        olat::FrameEstimate est =
            olat::estimate_frame(frame->v, mask->v, w->v, ex->v, cfg);
        if (blend)
            for (std::size_t p = 0; p < est.blend.size(); ++p)
                blend[p] = est.blend[p];
        if (trace_len)
            *trace_len = int(est.loss_trace.size());
        if (trace)
            for (int i = 0; i < trace_cap && i < int(est.loss_trace.size()); ++i)
                trace[i] = est.loss_trace[std::size_t(i)];
        if (stats) {
            stats->temperature = est.temperature;
            stats->residual_before = est.residual_before;
            stats->residual_after = est.residual_after;
        }
        *out_field = new olr_field{std::move(est.field)};
    });
}

/* ---- dataset manifests ------------------------------------------------- */

olr_status olr_manifest_load(const char* path, olr_manifest** out)
{
    if (!path || !out)
        return bad_arg("olr_manifest_load: null argument");
    return guard([&] { *out = new olr_manifest{olat::load_manifest(path)}; });
}

olr_status olr_manifest_basis_count(const olr_manifest* m, int* count)
{
    if (!m || !count)
        return bad_arg("olr_manifest_basis_count: null argument");
    *count = m->v.basis_count();
    return OLR_OK;
}

olr_status olr_manifest_dims(const olr_manifest* m, int* width, int* height)
{
    if (!m || !width || !height)
        return bad_arg("olr_manifest_dims: null argument");
    *width = m->v.dims.width;
    *height = m->v.dims.height;
    return OLR_OK;
}

olr_status olr_manifest_field(const olr_manifest* m, olr_field** out)
{
    if (!m || !out)
        return bad_arg("olr_manifest_field: null argument");
    return guard([&] { *out = new olr_field{olat::load_field(m->v)}; });
}

olr_status olr_manifest_footprints(const olr_manifest* m, double noise_floor,
                                   olr_footprints** out)
{
    if (!m || !out)
        return bad_arg("olr_manifest_footprints: null argument");
    return guard([&] {
        *out = new olr_footprints{olat::load_footprints(m->v, noise_floor)};
    });
}

olr_status olr_manifest_interview_probe(const olr_manifest* m, olr_image** out)
{
    if (!m || !out)
        return bad_arg("olr_manifest_interview_probe: null argument");
    return guard([&] {
        if (m->v.interview_probe.empty())
            olat::fail(olat::ErrorCode::InvalidArgument,
                       "manifest names no interview probe");
        *out = new olr_image{olat::load_image(m->v.interview_probe)};
    });
}

olr_status olr_manifest_exemplar_count(const olr_manifest* m, int* count)
{
    if (!m || !count)
        return bad_arg("olr_manifest_exemplar_count: null argument");
    *count = int(m->v.exemplars.size());
    return OLR_OK;
}

olr_status olr_manifest_exemplar_field(const olr_manifest* m, int pose,
                                       olr_field** out)
{
    if (!m || !out)
        return bad_arg("olr_manifest_exemplar_field: null argument");
    if (pose < 0 || pose >= int(m->v.exemplars.size()))
        return bad_arg("olr_manifest_exemplar_field: pose out of range");
    return guard([&] {
        const auto& entry = m->v.exemplars[std::size_t(pose)];
        auto field = std::make_unique<olr_field>();
        field->v.olats.reserve(entry.olats.size());
        for (const auto& p : entry.olats) {
            olat::ImageF img = olat::load_image(p);
            if (img.dims() != m->v.dims)
                olat::fail(olat::ErrorCode::DimensionMismatch,
                           p + ": dims disagree with manifest");
            field->v.olats.push_back(std::move(img));
        }
        field->v.validate();
        *out = field.release();
    });
}

olr_status olr_manifest_exemplars(const olr_manifest* m, const olr_weights* w,
                                  double gamma1, double gamma2,
                                  olr_exemplars** out)
{
    if (!m || !w || !out)
        return bad_arg("olr_manifest_exemplars: null argument");
    return guard([&] {
        *out = new olr_exemplars{
            olat::load_exemplars(m->v, w->v, {gamma1, gamma2})};
    });
}

/* ---- light-stage simulator --------------------------------------------- */

void olr_sphere_scene_init(olr_sphere_scene* scene)
{
    if (!scene)
        return;
    const olat::SphereScene defaults;
    for (int c = 0; c < 3; ++c) {
        scene->albedo[c] = defaults.albedo[std::size_t(c)];
        scene->ambient[c] = defaults.ambient[std::size_t(c)];
    }
    scene->radius_frac = defaults.radius_frac;
    scene->width = defaults.dims.width;
    scene->height = defaults.dims.height;
}

olr_status olr_render_olat(const olr_sphere_scene* scene, double theta,
                           double phi, olr_image** out)
{
    if (!scene || !out)
        return bad_arg("olr_render_olat: null argument");
    return guard([&] {
        *out = new olr_image{olat::render_olat(to_scene(*scene), {theta, phi})};
    });
}

olr_status olr_render_env(const olr_sphere_scene* scene, const olr_image* env,
                          olr_image** out)
{
    if (!scene || !env || !out)
        return bad_arg("olr_render_env: null argument");
    return guard([&] {
        *out = new olr_image{
            olat::render_env(to_scene(*scene), olat::LatLongMap(env->v))};
    });
}

olr_status olr_sphere_mask(const olr_sphere_scene* scene, olr_mask** out)
{
    if (!scene || !out)
        return bad_arg("olr_sphere_mask: null argument");
    return guard([&] { *out = new olr_mask{olat::sphere_mask(to_scene(*scene))}; });
}

void olr_simulate_options_init(olr_simulate_options* opts)
{
    if (!opts)
        return;
    olr_sphere_scene_init(&opts->scene);
    const olat::SimulateOptions defaults;
    opts->basis_count = defaults.basis_count;
    opts->env_width = defaults.env_dims.width;
    opts->env_height = defaults.env_dims.height;
    opts->pose_count = defaults.pose_count;
    opts->frame_count = defaults.frame_count;
    opts->seed = defaults.seed;
    opts->gamma1 = defaults.gamma.gamma1;
    opts->gamma2 = defaults.gamma.gamma2;
}

olr_status olr_simulate_dataset(const olr_simulate_options* opts,
                                const char* out_dir)
{
    if (!opts || !out_dir)
        return bad_arg("olr_simulate_dataset: null argument");
    return guard([&] {
        olat::SimulateOptions o;
        o.scene = to_scene(opts->scene);
        o.basis_count = opts->basis_count;
        o.env_dims = {opts->env_width, opts->env_height};
        o.pose_count = opts->pose_count;
        o.frame_count = opts->frame_count;
        o.seed = opts->seed;
        o.gamma = {opts->gamma1, opts->gamma2};
        olat::write_simulated_dataset(o, out_dir);
    });
}

/* ---- diagnostics ------------------------------------------------------- */

uint64_t olr_negative_clamp_count(void)
{
    return olat::diag::negative_clamp_count();
}

uint64_t olr_over_range_clamp_count(void)
{
    return olat::diag::over_range_clamp_count();
}

void olr_reset_counters(void) { olat::diag::reset_counters(); }

} // extern "C"
