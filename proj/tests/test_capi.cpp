// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

// Exercises the C boundary: status codes, thread-local error messages, and
// bit-exact agreement with the C++ core it wraps.

#include <doctest.h>

#include <cstring>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "olat/gamma.hpp"
#include "olat/image.hpp"
#include "olat/probe.hpp"
#include "olat/relight.hpp"
#include "olat_relight.h"
#include "test_util.hpp"

using doctest::Approx;

namespace {

template <auto D> struct fn_deleter {
    template <typename T> void operator()(T* p) const { D(p); }
};
using image_ptr = std::unique_ptr<olr_image, fn_deleter<&olr_image_destroy>>;
using mask_ptr = std::unique_ptr<olr_mask, fn_deleter<&olr_mask_destroy>>;
using weights_ptr = std::unique_ptr<olr_weights, fn_deleter<&olr_weights_destroy>>;
using field_ptr = std::unique_ptr<olr_field, fn_deleter<&olr_field_destroy>>;
using footprints_ptr =
    std::unique_ptr<olr_footprints, fn_deleter<&olr_footprints_destroy>>;
using exemplars_ptr =
    std::unique_ptr<olr_exemplars, fn_deleter<&olr_exemplars_destroy>>;
using manifest_ptr =
    std::unique_ptr<olr_manifest, fn_deleter<&olr_manifest_destroy>>;

// Wraps a core image into a C-API handle through the public buffer calls.
image_ptr to_handle(const olat::ImageF& img)
{
    olr_image* raw = nullptr;
    REQUIRE(olr_image_create(img.width(), img.height(), &raw) == OLR_OK);
    image_ptr out(raw);
    REQUIRE(olr_image_write(raw, img.data(), img.value_count()) == OLR_OK);
    return out;
}

std::vector<double> read_all(const olr_image* img)
{
    int w = 0, h = 0;
    REQUIRE(olr_image_dims(img, &w, &h) == OLR_OK);
    std::vector<double> buf(std::size_t(w) * std::size_t(h) * 3);
    REQUIRE(olr_image_read(img, buf.data(), buf.size()) == OLR_OK);
    return buf;
}

std::vector<double> flat(const olat::ImageF& img)
{
    return {img.data(), img.data() + img.value_count()};
}

} // namespace

TEST_CASE("capi: version, error lifecycle, and null-safe destroys")
{
    CHECK(std::string(olr_version()) == "0.1.0");

    olr_image* img = nullptr;
    REQUIRE(olr_image_create(2, 2, &img) == OLR_OK);
    image_ptr keep(img);
    CHECK(std::string(olr_last_error()).empty());

    olr_image* out = nullptr;
    CHECK(olr_image_load(nullptr, &out) == OLR_ERR_INVALID_ARGUMENT);
    CHECK(std::string(olr_last_error()).find("null argument") != std::string::npos);

    // The next successful guarded call clears the message.
    olr_image* again = nullptr;
    REQUIRE(olr_image_create(1, 1, &again) == OLR_OK);
    image_ptr keep2(again);
    CHECK(std::string(olr_last_error()).empty());

    olr_image_destroy(nullptr);
    olr_mask_destroy(nullptr);
    olr_footprints_destroy(nullptr);
    olr_weights_destroy(nullptr);
    olr_field_destroy(nullptr);
    olr_exemplars_destroy(nullptr);
    olr_manifest_destroy(nullptr);
}

TEST_CASE("capi: image buffers round trip and police their sizes")
{
    olr_image* raw = nullptr;
    REQUIRE(olr_image_create(3, 2, &raw) == OLR_OK);
    image_ptr img(raw);

    int w = 0, h = 0;
    REQUIRE(olr_image_dims(raw, &w, &h) == OLR_OK);
    CHECK(w == 3);
    CHECK(h == 2);

    std::vector<double> src(18);
    for (std::size_t i = 0; i < src.size(); ++i)
        src[i] = 0.1 * double(i);
    REQUIRE(olr_image_write(raw, src.data(), src.size()) == OLR_OK);
    CHECK(read_all(raw) == src);

    CHECK(olr_image_read(raw, src.data(), 17) == OLR_ERR_INVALID_ARGUMENT);
    CHECK(std::string(olr_last_error()).find("width*height*3") !=
          std::string::npos);

    olr_image* bad = nullptr;
    CHECK(olr_image_create(0, 2, &bad) == OLR_ERR_INVALID_ARGUMENT);
    CHECK(bad == nullptr);
}

TEST_CASE("capi: file failures map onto distinct status codes")
{
    testutil::ScratchDir dir;
    olr_image* out = nullptr;

    CHECK(olr_image_load(dir.file("absent.pfm").c_str(), &out) == OLR_ERR_IO);
    CHECK(out == nullptr);

    {
        std::ofstream junk(dir.file("junk.pfm"), std::ios::binary);
        junk << "this is not an image";
    }
    CHECK(olr_image_load(dir.file("junk.pfm").c_str(), &out) == OLR_ERR_FORMAT);

    // Round trip through PFM keeps float-quantized values.
    std::mt19937 rng(3);
    const olat::ImageF img = testutil::random_image(4, 3, rng);
    image_ptr handle = to_handle(img);
    REQUIRE(olr_image_save(handle.get(), dir.file("img.pfm").c_str()) == OLR_OK);
    olr_image* loaded_raw = nullptr;
    REQUIRE(olr_image_load(dir.file("img.pfm").c_str(), &loaded_raw) == OLR_OK);
    image_ptr loaded(loaded_raw);
    const std::vector<double> got = read_all(loaded_raw);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == double(float(img.data()[i])));

    // Mask of the wrong shape is a dimension error, not a crash.
    olr_mask* mask = nullptr;
    REQUIRE(olr_mask_create(2, 2, 1.0, &mask) == OLR_OK);
    mask_ptr mkeep(mask);
    CHECK(olr_image_apply_mask(handle.get(), mask, &out) ==
          OLR_ERR_DIMENSION_MISMATCH);
}

TEST_CASE("capi: relight agrees with the core bit for bit")
{
    std::mt19937 rng(11);
    std::vector<olat::ImageF> olats;
    std::vector<image_ptr> handles;
    std::vector<const olr_image*> raw;
    for (int k = 0; k < 3; ++k) {
        olats.push_back(testutil::random_image(5, 4, rng));
        handles.push_back(to_handle(olats.back()));
        raw.push_back(handles.back().get());
    }

    olr_field* field_raw = nullptr;
    REQUIRE(olr_field_from_images(raw.data(), 3, &field_raw) == OLR_OK);
    field_ptr field(field_raw);

    int count = 0, w = 0, h = 0;
    REQUIRE(olr_field_count(field_raw, &count) == OLR_OK);
    REQUIRE(olr_field_dims(field_raw, &w, &h) == OLR_OK);
    CHECK(count == 3);
    CHECK(w == 5);
    CHECK(h == 4);

    SUBCASE("one-hot weights return the basis image unchanged")
    {
        for (int hot = 0; hot < 3; ++hot) {
            std::vector<double> rgb(9, 0.0);
            rgb[std::size_t(hot) * 3 + 0] = 1.0;
            rgb[std::size_t(hot) * 3 + 1] = 1.0;
            rgb[std::size_t(hot) * 3 + 2] = 1.0;
            olr_weights* w_raw = nullptr;
            REQUIRE(olr_weights_create(3, rgb.data(), &w_raw) == OLR_OK);
            weights_ptr ww(w_raw);
            olr_image* relit_raw = nullptr;
            REQUIRE(olr_relight(field_raw, w_raw, &relit_raw) == OLR_OK);
            image_ptr relit(relit_raw);
            CHECK(read_all(relit_raw) == flat(olats[std::size_t(hot)]));
        }
    }
    SUBCASE("random weights match olat::relight exactly")
    {
        std::uniform_real_distribution<double> coef(-1.0, 2.0);
        std::vector<double> rgb(9);
        olat::LightingWeights cw = olat::LightingWeights::zero(3);
        for (int k = 0; k < 3; ++k)
            for (int c = 0; c < 3; ++c) {
                rgb[std::size_t(k) * 3 + std::size_t(c)] = coef(rng);
                cw.values[std::size_t(k)][std::size_t(c)] =
                    rgb[std::size_t(k) * 3 + std::size_t(c)];
            }
        olr_weights* w_raw = nullptr;
        REQUIRE(olr_weights_create(3, rgb.data(), &w_raw) == OLR_OK);
        weights_ptr ww(w_raw);
        olr_image* relit_raw = nullptr;
        REQUIRE(olr_relight(field_raw, w_raw, &relit_raw) == OLR_OK);
        image_ptr relit(relit_raw);
        const olat::ReflectanceField cf{olats};
        CHECK(read_all(relit_raw) == flat(olat::relight(cf, cw)));
    }
    SUBCASE("field_get copies one basis image")
    {
        olr_image* got_raw = nullptr;
        REQUIRE(olr_field_get(field_raw, 1, &got_raw) == OLR_OK);
        image_ptr got(got_raw);
        CHECK(read_all(got_raw) == flat(olats[1]));
    }
    SUBCASE("ragged stacks are rejected")
    {
        olat::ImageF odd(2, 2);
        image_ptr odd_h = to_handle(odd);
        std::vector<const olr_image*> bad = raw;
        bad.push_back(odd_h.get());
        olr_field* f2 = nullptr;
        CHECK(olr_field_from_images(bad.data(), 4, &f2) ==
              OLR_ERR_DIMENSION_MISMATCH);
    }
    SUBCASE("directory round trip")
    {
        testutil::ScratchDir dir;
        REQUIRE(olr_field_save_dir(field_raw, dir.file("f").c_str()) == OLR_OK);
        olr_field* back_raw = nullptr;
        REQUIRE(olr_field_load_dir(dir.file("f").c_str(), &back_raw) == OLR_OK);
        field_ptr back(back_raw);
        for (int k = 0; k < 3; ++k) {
            olr_image* got_raw = nullptr;
            REQUIRE(olr_field_get(back_raw, k, &got_raw) == OLR_OK);
            image_ptr got(got_raw);
            const std::vector<double> vals = read_all(got_raw);
            const olat::ImageF& src = olats[std::size_t(k)];
            for (std::size_t i = 0; i < vals.size(); ++i)
                CHECK(vals[i] == double(float(src.data()[i])));
        }
    }
}

TEST_CASE("capi: dual gamma application and recovery")
{
    std::mt19937 rng(23);
    const olat::ImageF img = testutil::random_image(6, 4, rng);
    image_ptr handle = to_handle(img);

    olr_image* mapped_raw = nullptr;
    REQUIRE(olr_apply_dual_gamma(handle.get(), 1.7, 0.6, &mapped_raw) == OLR_OK);
    image_ptr mapped(mapped_raw);
    CHECK(read_all(mapped_raw) ==
          flat(olat::apply_dual_gamma(img, olat::DualGamma{1.7, 0.6})));

    // Recover a known curve from a synthetic target.
    std::vector<olat::ImageF> olats;
    std::vector<image_ptr> handles;
    std::vector<const olr_image*> raw;
    std::vector<double> rgb;
    std::uniform_real_distribution<double> coef(0.3, 1.0);
    olat::LightingWeights cw = olat::LightingWeights::zero(4);
    for (int k = 0; k < 4; ++k) {
        olats.push_back(testutil::random_image(8, 8, rng));
        handles.push_back(to_handle(olats.back()));
        raw.push_back(handles.back().get());
        for (int c = 0; c < 3; ++c) {
            const double v = coef(rng);
            rgb.push_back(v);
            cw.values[std::size_t(k)][std::size_t(c)] = v;
        }
    }
    olr_field* field_raw = nullptr;
    REQUIRE(olr_field_from_images(raw.data(), 4, &field_raw) == OLR_OK);
    field_ptr field(field_raw);
    olr_weights* w_raw = nullptr;
    REQUIRE(olr_weights_create(4, rgb.data(), &w_raw) == OLR_OK);
    weights_ptr ww(w_raw);

    const olat::DualGamma truth{1.8, 0.6};
    const olat::ImageF target =
        olat::relight(olat::apply_dual_gamma(olat::ReflectanceField{olats}, truth),
                      cw);
    image_ptr target_h = to_handle(target);
    olr_mask* mask_raw = nullptr;
    REQUIRE(olr_mask_create(8, 8, 1.0, &mask_raw) == OLR_OK);
    mask_ptr mask(mask_raw);

    double g1 = 0.0, g2 = 0.0;
    REQUIRE(olr_fit_dual_gamma(field_raw, w_raw, target_h.get(), mask_raw, 0.2,
                               5.0, &g1, &g2, nullptr) == OLR_OK);
    CHECK(g1 == Approx(truth.gamma1).epsilon(1e-3));
    CHECK(g2 == Approx(truth.gamma2).epsilon(1e-3));

    double residual = 1.0;
    REQUIRE(olr_fit_dual_gamma(field_raw, w_raw, target_h.get(), mask_raw, 0.2,
                               5.0, &g1, &g2, &residual) == OLR_OK);
    CHECK(residual < 1e-9);
}

TEST_CASE("capi: probes, projection, and the mirror-ball unwrap")
{
    // A constant ball unwraps to a constant environment; radius <= 0 picks the
    // inscribed circle automatically.
    olat::ImageF ball(9, 9, 0.0);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x)
            for (int c = 0; c < 3; ++c)
                ball.at(x, y, c) = 0.625;
    image_ptr ball_h = to_handle(ball);
    olr_image* env_raw = nullptr;
    REQUIRE(olr_mirrorball_unwrap(ball_h.get(), 0.0, 0.0, -1.0, 16, 8,
                                  &env_raw) == OLR_OK);
    image_ptr env(env_raw);
    int ew = 0, eh = 0;
    REQUIRE(olr_image_dims(env_raw, &ew, &eh) == OLR_OK);
    CHECK(ew == 16);
    CHECK(eh == 8);
    for (const double v : read_all(env_raw))
        CHECK(v == Approx(0.625).epsilon(1e-12));

    // Delta probes project a constant environment onto its own value.
    std::vector<olat::ImageF> probes;
    std::vector<image_ptr> probe_h;
    std::vector<const olr_image*> probe_raw;
    for (int k = 0; k < 2; ++k) {
        olat::ImageF p(16, 8, 0.0);
        for (int c = 0; c < 3; ++c)
            p.at(3 + 5 * k, 2 + 3 * k, c) = 1.0;
        probes.push_back(p);
        probe_h.push_back(to_handle(p));
        probe_raw.push_back(probe_h.back().get());
    }
    olr_footprints* fp_raw = nullptr;
    REQUIRE(olr_footprints_from_probes(probe_raw.data(), 2, 0.05, &fp_raw) ==
            OLR_OK);
    footprints_ptr fp(fp_raw);
    int n = 0;
    REQUIRE(olr_footprints_count(fp_raw, &n) == OLR_OK);
    CHECK(n == 2);

    olat::ImageF flat_env(16, 8, 0.0);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 16; ++x) {
            flat_env.at(x, y, 0) = 0.75;
            flat_env.at(x, y, 1) = 0.25;
            flat_env.at(x, y, 2) = 1.5;
        }
    image_ptr flat_h = to_handle(flat_env);
    olr_weights* w_raw = nullptr;
    REQUIRE(olr_project_environment(flat_h.get(), fp_raw, &w_raw) == OLR_OK);
    weights_ptr ww(w_raw);
    std::vector<double> rgb(6);
    REQUIRE(olr_weights_read(w_raw, rgb.data(), rgb.size()) == OLR_OK);
    for (int k = 0; k < 2; ++k) {
        CHECK(rgb[std::size_t(k) * 3 + 0] == Approx(0.75).epsilon(1e-12));
        CHECK(rgb[std::size_t(k) * 3 + 1] == Approx(0.25).epsilon(1e-12));
        CHECK(rgb[std::size_t(k) * 3 + 2] == Approx(1.5).epsilon(1e-12));
    }

    // Environment dims must match the footprints.
    olr_image* small_env = nullptr;
    REQUIRE(olr_image_create(8, 4, &small_env) == OLR_OK);
    image_ptr se(small_env);
    olr_weights* w2 = nullptr;
    CHECK(olr_project_environment(small_env, fp_raw, &w2) ==
          OLR_ERR_DIMENSION_MISMATCH);

    // Weights survive the JSON file format exactly.
    testutil::ScratchDir dir;
    REQUIRE(olr_weights_save(w_raw, dir.file("w.json").c_str()) == OLR_OK);
    olr_weights* back_raw = nullptr;
    REQUIRE(olr_weights_load(dir.file("w.json").c_str(), &back_raw) == OLR_OK);
    weights_ptr back(back_raw);
    std::vector<double> rgb2(6);
    REQUIRE(olr_weights_read(back_raw, rgb2.data(), rgb2.size()) == OLR_OK);
    CHECK(rgb2 == rgb);
}

TEST_CASE("capi: simulate, load the manifest, and estimate a frame")
{
    testutil::ScratchDir dir;
    olr_simulate_options opts;
    olr_simulate_options_init(&opts);
    opts.scene.width = 24;
    opts.scene.height = 24;
    opts.basis_count = 8;
    opts.env_width = 32;
    opts.env_height = 16;
    opts.pose_count = 2;
    opts.frame_count = 2;
    opts.seed = 77;
    opts.gamma1 = 1.4;
    opts.gamma2 = 0.8;
    const std::string ds = dir.file("ds");
    REQUIRE(olr_simulate_dataset(&opts, ds.c_str()) == OLR_OK);

    olr_manifest* m_raw = nullptr;
    REQUIRE(olr_manifest_load((ds + "/manifest.json").c_str(), &m_raw) == OLR_OK);
    manifest_ptr m(m_raw);

    int basis = 0, w = 0, h = 0, poses = 0;
    REQUIRE(olr_manifest_basis_count(m_raw, &basis) == OLR_OK);
    REQUIRE(olr_manifest_dims(m_raw, &w, &h) == OLR_OK);
    REQUIRE(olr_manifest_exemplar_count(m_raw, &poses) == OLR_OK);
    CHECK(basis == 8);
    CHECK(w == 24);
    CHECK(h == 24);
    CHECK(poses == 2);

    olr_footprints* fp_raw = nullptr;
    REQUIRE(olr_manifest_footprints(m_raw, 0.05, &fp_raw) == OLR_OK);
    footprints_ptr fp(fp_raw);
    int fpn = 0;
    REQUIRE(olr_footprints_count(fp_raw, &fpn) == OLR_OK);
    CHECK(fpn == 8);

    olr_image* env_raw = nullptr;
    REQUIRE(olr_manifest_interview_probe(m_raw, &env_raw) == OLR_OK);
    image_ptr env(env_raw);
    int ew = 0, eh = 0;
    REQUIRE(olr_image_dims(env_raw, &ew, &eh) == OLR_OK);
    CHECK(ew == 32);
    CHECK(eh == 16);

    olr_weights* w_raw = nullptr;
    REQUIRE(olr_project_environment(env_raw, fp_raw, &w_raw) == OLR_OK);
    weights_ptr ww(w_raw);

    olr_exemplars* ex_raw = nullptr;
    REQUIRE(olr_manifest_exemplars(m_raw, w_raw, opts.gamma1, opts.gamma2,
                                   &ex_raw) == OLR_OK);
    exemplars_ptr ex(ex_raw);
    int exn = 0;
    REQUIRE(olr_exemplars_count(ex_raw, &exn) == OLR_OK);
    CHECK(exn == 2);

    olr_image* frame_raw = nullptr;
    REQUIRE(olr_image_load((ds + "/frames/frame_000.pfm").c_str(), &frame_raw) ==
            OLR_OK);
    image_ptr frame(frame_raw);
    olr_mask* mask_raw = nullptr;
    REQUIRE(olr_mask_load((ds + "/masks/frame_000.pfm").c_str(), &mask_raw) ==
            OLR_OK);
    mask_ptr mask(mask_raw);

    olr_estimate_options eopts;
    olr_estimate_options_init(&eopts);
    CHECK(eopts.lambda_prior == 0.1);
    CHECK(eopts.iterations == 200);
    CHECK(eopts.use_iterative == 0);
    CHECK(eopts.lambda1 == 1.0);
    CHECK(eopts.lambda2 == 1.0);

    SUBCASE("closed-form ridge estimate")
    {
        std::vector<double> blend(2, 0.0);
        int trace_len = -1;
        olr_frame_stats stats{};
        olr_field* est_raw = nullptr;
        REQUIRE(olr_estimate_frame(frame_raw, mask_raw, w_raw, ex_raw, &eopts,
                                   &est_raw, blend.data(), nullptr, 0,
                                   &trace_len, &stats) == OLR_OK);
        field_ptr est(est_raw);

        int est_count = 0, est_w = 0, est_h = 0;
        REQUIRE(olr_field_count(est_raw, &est_count) == OLR_OK);
        REQUIRE(olr_field_dims(est_raw, &est_w, &est_h) == OLR_OK);
        CHECK(est_count == 8);
        CHECK(est_w == 24);
        CHECK(est_h == 24);
        CHECK(blend[0] + blend[1] == Approx(1.0).epsilon(1e-9));
        CHECK(trace_len == 0);
        CHECK(stats.temperature > 0.0);
        CHECK(stats.residual_after <= stats.residual_before + 1e-12);
    }
    SUBCASE("iterative estimate reports its loss trace")
    {
        eopts.use_iterative = 1;
        eopts.iterations = 30;
        std::vector<double> trace(64, -1.0);
        int trace_len = -1;
        olr_field* est_raw = nullptr;
        REQUIRE(olr_estimate_frame(frame_raw, mask_raw, w_raw, ex_raw, &eopts,
                                   &est_raw, nullptr, trace.data(),
                                   int(trace.size()), &trace_len,
                                   nullptr) == OLR_OK);
        field_ptr est(est_raw);
        REQUIRE(trace_len == 31);
        CHECK(trace[30] <= trace[0] + 1e-12);
        CHECK(trace[31] == -1.0); // untouched beyond the real length

        // A short cap truncates without error and still reports the length.
        std::vector<double> short_trace(8, -1.0);
        olr_field* est2_raw = nullptr;
        REQUIRE(olr_estimate_frame(frame_raw, mask_raw, w_raw, ex_raw, &eopts,
                                   &est2_raw, nullptr, short_trace.data(), 8,
                                   &trace_len, nullptr) == OLR_OK);
        field_ptr est2(est2_raw);
        CHECK(trace_len == 31);
        CHECK(short_trace[7] != -1.0);
    }
    SUBCASE("null frame is rejected up front")
    {
        olr_field* est_raw = nullptr;
        CHECK(olr_estimate_frame(nullptr, mask_raw, w_raw, ex_raw, &eopts,
                                 &est_raw, nullptr, nullptr, 0, nullptr,
                                 nullptr) == OLR_ERR_INVALID_ARGUMENT);
    }
}

TEST_CASE("capi: clamp counters are visible and resettable")
{
    olr_reset_counters();
    CHECK(olr_negative_clamp_count() == 0);
    CHECK(olr_over_range_clamp_count() == 0);

    // An over-range input to the dual gamma trips the soft clamp once.
    olr_image* raw = nullptr;
    REQUIRE(olr_image_create(1, 1, &raw) == OLR_OK);
    image_ptr img(raw);
    const double hot[3] = {1.5, 0.5, 0.5};
    REQUIRE(olr_image_write(raw, hot, 3) == OLR_OK);
    olr_image* mapped_raw = nullptr;
    REQUIRE(olr_apply_dual_gamma(raw, 2.0, 0.5, &mapped_raw) == OLR_OK);
    image_ptr mapped(mapped_raw);
    CHECK(olr_over_range_clamp_count() == 1);

    olr_reset_counters();
    CHECK(olr_over_range_clamp_count() == 0);
}
