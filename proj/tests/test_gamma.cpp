// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include <olat/error.hpp>
#include <olat/gamma.hpp>
#include <olat/stagesim.hpp>

#include "test_util.hpp"

using namespace olat;

TEST_CASE("dual gamma with unit exponents is the identity")
{
    const DualGamma g{1.0, 1.0};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double v = dist(rng);
        CHECK(g.evaluate(v) == doctest::Approx(v).epsilon(1e-15));
    }
}

TEST_CASE("dual gamma fixes the endpoints for any exponents")
{
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> dist(0.2, 5.0);
    for (int i = 0; i < 25; ++i) {
        const DualGamma g{dist(rng), dist(rng)};
        CHECK(g.evaluate(0.0) == 0.0);
        CHECK(g.evaluate(1.0) == 1.0);
    }
}

TEST_CASE("dual gamma is monotone on [0,1]")
{
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> dist(0.2, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        const DualGamma g{dist(rng), dist(rng)};
        double prev = g.evaluate(0.0);
        for (int i = 1; i <= 500; ++i) {
            const double cur = g.evaluate(i / 500.0);
            CHECK(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("dual gamma clamps over-range input and counts it")
{
    diag::reset_counters();
    ImageF img(1, 1);
    img.at(0, 0, 0) = 1.5;
    img.at(0, 0, 1) = 0.5;
    img.at(0, 0, 2) = 0.25;
    const ImageF out = apply_dual_gamma(img, {2.0, 0.5});
    CHECK(out.at(0, 0, 0) == 1.0);
    CHECK(diag::over_range_clamp_count() == 1);
    // (1-v)*v^2 + v*v^0.5 hand-evaluated at 0.5 and 0.25.
    CHECK(out.at(0, 0, 1) ==
          doctest::Approx(0.5 * 0.25 + 0.5 * std::sqrt(0.5)).epsilon(1e-15));
    CHECK(out.at(0, 0, 2) ==
          doctest::Approx(0.75 * 0.0625 + 0.25 * 0.5).epsilon(1e-15));
    diag::reset_counters();
}

TEST_CASE("gamma exponents outside [0.2, 5] are rejected")
{
    CHECK_THROWS_AS((DualGamma{0.1, 1.0}.validate()), Error);
    CHECK_THROWS_AS((DualGamma{1.0, 5.5}.validate()), Error);
    CHECK_NOTHROW((DualGamma{0.2, 5.0}.validate()));
}

TEST_CASE("field gamma equals per-image gamma")
{
    std::mt19937 rng(9);
    ReflectanceField field;
    field.olats.push_back(testutil::random_image(5, 4, rng));
    field.olats.push_back(testutil::random_image(5, 4, rng));
    const DualGamma g{1.7, 0.6};
    const ReflectanceField out = apply_dual_gamma(field, g);
    for (int k = 0; k < 2; ++k) {
        const ImageF one = apply_dual_gamma(field.olats[std::size_t(k)], g);
        CHECK(out.olats[std::size_t(k)].pixels() == one.pixels());
    }
}

TEST_CASE("masked_mse hand example")
{
    ImageF a(2, 1, 0.0), b(2, 1, 0.0);
    a.at(0, 0, 0) = 1.0; // diff 1, weight 0.5
    b.at(1, 0, 2) = 2.0; // diff 2, weight 1
    MaskImage mask(2, 1);
    mask.at(0, 0) = 0.5;
    mask.at(1, 0) = 1.0;
    // (0.5*1 + 1*4) / (3 * 1.5)
    CHECK(masked_mse(a, b, mask) == doctest::Approx(4.5 / 4.5).epsilon(1e-15));
    CHECK_THROWS_AS(masked_mse(a, b, MaskImage(2, 1, 0.0)), Error);
    CHECK_THROWS_AS(masked_mse(a, ImageF(3, 1), mask), Error);
}

namespace {

// Small sphere dataset shared by the fit tests.
struct FitFixture {
    ReflectanceField field;
    LightingWeights w;
    MaskImage mask;

    FitFixture()
    {
        SphereScene scene;
        scene.dims = {16, 16};
        const auto dirs = fibonacci_directions(6);
        const SimulatedDataset ds = generate_dataset(scene, dirs, {32, 16});
        field = ds.field;
        std::mt19937 rng(123);
        std::uniform_real_distribution<double> dist(0.3, 1.2);
        w = LightingWeights::zero(6);
        for (auto& wk : w.values)
            for (double& c : wk)
                c = dist(rng);
        mask = sphere_mask(scene);
    }
};

} // namespace

TEST_CASE("fit_dual_gamma recovers a known curve")
{
    const FitFixture fx;
    const DualGamma truth{2.2, 0.9};
    const ImageF target = relight(apply_dual_gamma(fx.field, truth), fx.w);
    const GammaFitResult fit = fit_dual_gamma(fx.field, fx.w, target, fx.mask);
    CHECK(fit.gamma.gamma1 == doctest::Approx(truth.gamma1).epsilon(1e-3));
    CHECK(fit.gamma.gamma2 == doctest::Approx(truth.gamma2).epsilon(1e-3));
    CHECK(fit.residual < 1e-10);
}

TEST_CASE("fit_dual_gamma recovers the identity for linear footage")
{
    // Narrow-range scenes flatten the objective into a curved valley; the fit
    // must still prefer the exact identity over a boundary local minimum.
    const FitFixture fx;
    const ImageF target = relight(fx.field, fx.w);
    const GammaFitResult fit = fit_dual_gamma(fx.field, fx.w, target, fx.mask);
    CHECK(fit.gamma.gamma1 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fit.gamma.gamma2 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fit.residual < 1e-12);
}

TEST_CASE("fit_dual_gamma input validation")
{
    const FitFixture fx;
    const ImageF target = relight(fx.field, fx.w);
    CHECK_THROWS_AS(
        fit_dual_gamma(fx.field, fx.w, target, MaskImage(16, 16, 0.0)), Error);
    CHECK_THROWS_AS(fit_dual_gamma(fx.field, fx.w, ImageF(8, 8), fx.mask), Error);
    GammaFitOptions bad;
    bad.hi = bad.lo;
    CHECK_THROWS_AS(fit_dual_gamma(fx.field, fx.w, target, fx.mask, bad), Error);
}
