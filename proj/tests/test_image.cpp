// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include <olat/error.hpp>
#include <olat/image.hpp>

#include "test_util.hpp"

using namespace olat;
using testutil::ScratchDir;

TEST_CASE("pfm round trip is exact at float32 precision")
{
    ScratchDir tmp;
    std::mt19937 rng(42);
    ImageF img = testutil::random_image(13, 7, rng, 0.0, 8.0);
    img.at(3, 2, 1) = 1e-5;
    img.at(0, 0, 0) = 1234.5;

    const std::string path = tmp.file("a.pfm");
    save_image(img, path);
    const ImageF back = load_image(path);

    REQUIRE(back.dims() == img.dims());
    for (std::size_t i = 0; i < img.pixels().size(); ++i)
        CHECK(back.pixels()[i] == double(float(img.pixels()[i])));
}

TEST_CASE("pfm load clamps negative samples and counts them")
{
    ScratchDir tmp;
    ImageF img(2, 2, 0.25);
    img.at(1, 1, 2) = -0.5;
    const std::string path = tmp.file("neg.pfm");
    save_image(img, path);

    diag::reset_counters();
    const ImageF back = load_image(path);
    CHECK(back.at(1, 1, 2) == 0.0);
    CHECK(back.at(0, 0, 0) == 0.25);
    CHECK(diag::negative_clamp_count() == 1);
    diag::reset_counters();
}

TEST_CASE("png round trip quantizes to 8 bits, round half up")
{
    ScratchDir tmp;
    std::mt19937 rng(7);
    ImageF img = testutil::random_image(9, 5, rng);
    img.at(0, 0, 0) = 1.7; // clamps to 1 on save
    const std::string path = tmp.file("a.png");
    save_image(img, path);
    const ImageF back = load_image(path);

    REQUIRE(back.dims() == img.dims());
    for (std::size_t i = 0; i < img.pixels().size(); ++i) {
        const double v = std::clamp(img.pixels()[i], 0.0, 1.0);
        CHECK(back.pixels()[i] ==
              doctest::Approx(std::floor(v * 255.0 + 0.5) / 255.0).epsilon(1e-12));
    }
}

TEST_CASE("image load failure modes")
{
    ScratchDir tmp;
    CHECK_THROWS_WITH_AS(load_image(tmp.file("missing.pfm")),
                         doctest::Contains("cannot open"), Error);
    try {
        load_image(tmp.file("missing.pfm"));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }

    std::ofstream(tmp.file("junk.pfm")) << "this is not an image at all";
    try {
        load_image(tmp.file("junk.pfm"));
        FAIL("expected a format error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Format);
    }

    // Saving dispatches on ".png" only; any other extension gets PFM bytes,
    // and loading sniffs the content rather than trusting the name.
    ImageF img(2, 2, 0.5);
    save_image(img, tmp.file("a.bmp"));
    CHECK(load_image(tmp.file("a.bmp")).pixels() == img.pixels());
}

TEST_CASE("pad_and_resize is the identity when dims already match")
{
    std::mt19937 rng(3);
    const ImageF img = testutil::random_image(17, 11, rng);
    const ImageF out = pad_and_resize(img, {17, 11});
    CHECK(out.pixels() == img.pixels());
}

TEST_CASE("pad_and_resize letterboxes a portrait frame into a square")
{
    // 1080x1920 -> pad to 1920x1920 (420 columns each side) -> scale to 512.
    // 420 / (1920/512) = 112 output columns land exactly in the padding.
    const ImageF ones(1080, 1920, 1.0);
    const ImageF out = pad_and_resize(ones, {512, 512});
    REQUIRE(out.dims() == ImageDims{512, 512});
    for (int y = 0; y < 512; y += 37)
        for (int c = 0; c < 3; ++c) {
            CHECK(out.at(0, y, c) == 0.0);
            CHECK(out.at(111, y, c) == 0.0);
            CHECK(out.at(112, y, c) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(out.at(399, y, c) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(out.at(400, y, c) == 0.0);
            CHECK(out.at(511, y, c) == 0.0);
        }
}

TEST_CASE("pad_and_resize letterboxes a landscape frame symmetrically")
{
    const ImageF ones(1920, 1080, 1.0);
    const ImageF out = pad_and_resize(ones, {512, 512});
    for (int x = 0; x < 512; x += 41)
        for (int c = 0; c < 3; ++c) {
            CHECK(out.at(x, 0, c) == 0.0);
            CHECK(out.at(x, 111, c) == 0.0);
            CHECK(out.at(x, 112, c) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(out.at(x, 400, c) == 0.0);
        }
}

TEST_CASE("apply_mask multiplies channels and checks dims")
{
    ImageF img(2, 1);
    img.at(0, 0, 0) = 2.0;
    img.at(0, 0, 1) = 1.0;
    img.at(1, 0, 2) = 4.0;
    MaskImage mask(2, 1);
    mask.at(0, 0) = 0.5;
    mask.at(1, 0) = 0.0;

    const ImageF out = apply_mask(img, mask);
    CHECK(out.at(0, 0, 0) == 1.0);
    CHECK(out.at(0, 0, 1) == 0.5);
    CHECK(out.at(1, 0, 2) == 0.0);

    CHECK(mask_mass(mask) == 0.5);
    CHECK_THROWS_AS(apply_mask(img, MaskImage(3, 1)), Error);
}

TEST_CASE("mask values clamp to [0,1] on construction")
{
    MaskImage mask(2, 1, 1.0);
    mask.values() = {1.5, -0.25};
    mask.clamp_values();
    CHECK(mask.at(0, 0) == 1.0);
    CHECK(mask.at(1, 0) == 0.0);
}

TEST_CASE("bilinear_sample hits pixel centers exactly and clamps at borders")
{
    ImageF img(3, 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(x, y, c) = 10.0 * y + x;

    CHECK(bilinear_sample(img, 0.5, 0.5, 0) == 0.0);
    CHECK(bilinear_sample(img, 2.5, 1.5, 0) == 12.0);
    CHECK(bilinear_sample(img, 1.0, 0.5, 0) == 0.5); // midway between 0 and 1
    CHECK(bilinear_sample(img, -4.0, 0.5, 0) == 0.0);
    CHECK(bilinear_sample(img, 99.0, 99.0, 0) == 12.0);
}

TEST_CASE("mask save/load round trip through pfm")
{
    ScratchDir tmp;
    std::mt19937 rng(11);
    MaskImage mask = testutil::random_mask(6, 4, rng);
    const std::string path = tmp.file("m.pfm");
    save_mask(mask, path);
    const MaskImage back = load_mask(path);
    REQUIRE(back.dims() == mask.dims());
    for (std::size_t i = 0; i < mask.values().size(); ++i)
        CHECK(back.values()[i] == double(float(mask.values()[i])));
}

TEST_CASE("image constructor rejects bad shapes")
{
    CHECK_THROWS_AS(ImageF(0, 4), Error);
    CHECK_THROWS_AS(ImageF(4, -1), Error);
    CHECK_THROWS_AS(ImageF(2, 2, std::vector<double>(5, 0.0)), Error);
    CHECK_THROWS_AS(pad_and_resize(ImageF(2, 2), {0, 5}), Error);
}
