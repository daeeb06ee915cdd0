// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "olat/error.hpp"

namespace olat {

struct ImageDims {
    int width = 0;
    int height = 0;
    bool operator==(const ImageDims&) const = default;
};

// RGB radiance image, row-major, channel-interleaved, top row first.
// Pixels are kept in double precision; the file formats quantize at the
// I/O boundary (PFM: float32, PNG: 8-bit).
class ImageF {
public:
    static constexpr int kChannels = 3;

    ImageF() = default;
    ImageF(int width, int height, double fill = 0.0);
    ImageF(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    ImageDims dims() const { return {width_, height_}; }
    std::size_t pixel_count() const { return std::size_t(width_) * height_; }
    std::size_t value_count() const { return pixel_count() * kChannels; }

    double& at(int x, int y, int c)
    {
        return data_[(std::size_t(y) * width_ + x) * kChannels + c];
    }
    double at(int x, int y, int c) const
    {
        return data_[(std::size_t(y) * width_ + x) * kChannels + c];
    }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& pixels() { return data_; }
    const std::vector<double>& pixels() const { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

// Per-pixel weight in [0,1]; values are clamped on construction.
class MaskImage {
public:
    MaskImage() = default;
    MaskImage(int width, int height, double fill = 1.0);
    MaskImage(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    ImageDims dims() const { return {width_, height_}; }

    double& at(int x, int y) { return data_[std::size_t(y) * width_ + x]; }
    double at(int x, int y) const { return data_[std::size_t(y) * width_ + x]; }

    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    void clamp_values();

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

// Counters for soft clamps (negative PFM samples, over-range gamma inputs).
// Shared across threads; reset between jobs as needed.
namespace diag {
std::uint64_t negative_clamp_count();
std::uint64_t over_range_clamp_count();
void reset_counters();
void add_negative_clamps(std::uint64_t n);
void add_over_range_clamps(std::uint64_t n);
} // namespace diag

// Loads a PFM ("PF"/"Pf", either endianness) or 8-bit PNG image. PNG bytes
// map to [0,1] by dividing by 255 with no transfer-curve decode; PFM values
// pass through verbatim except that negatives clamp to zero (counted).
ImageF load_image(const std::string& path);

// Loads a mask: grayscale PFM directly, RGB as the channel mean, PNG alpha
// when present. Values clamp to [0,1].
MaskImage load_mask(const std::string& path);

// Writes PFM (".pfm", float32 little-endian) or PNG (".png", clamp to [0,1],
// scale by 255, round half up). Files are written via temp + rename.
void save_image(const ImageF& img, const std::string& path);
void save_mask(const MaskImage& mask, const std::string& path);

// Letterboxes with zeros to the target aspect ratio (centered), then
// resamples bilinearly to the target dims. Identity when dims already match.
ImageF pad_and_resize(const ImageF& img, ImageDims target);

// Per-pixel multiply of all channels by the mask weight.
ImageF apply_mask(const ImageF& img, const MaskImage& mask);

double mask_mass(const MaskImage& mask);

// Bilinear sample in continuous image coordinates (pixel i covers [i, i+1),
// center at i + 0.5); clamps at the borders.
double bilinear_sample(const ImageF& img, double x, double y, int c);

} // namespace olat
