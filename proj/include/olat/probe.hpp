// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "olat/image.hpp"

namespace olat {

// Shared spherical convention, used by every module:
//   longitude  phi   = 2*pi*(u+0.5)/W - pi
//   colatitude theta = pi*(v+0.5)/H          (0 at the top row)
//   direction  d     = (sin(theta)*cos(phi), cos(theta), sin(theta)*sin(phi))
// +z points toward the camera; theta=0 is up.
struct Direction {
    double theta = 0.0;
    double phi = 0.0;
};

std::array<double, 3> direction_to_unit(Direction dir);

// Mirror-ball photograph with circle geometry in continuous image
// coordinates (pixel i covers [i, i+1)).
struct MirrorBall {
    ImageF image;
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 0.0;

    void validate() const;
};

// Latitude-longitude radiance map; width is always 2 x height.
class LatLongMap {
public:
    LatLongMap() = default;
    explicit LatLongMap(ImageF map);
    LatLongMap(int width, int height, double fill = 0.0);

    const ImageF& image() const { return map_; }
    ImageF& image() { return map_; }
    int width() const { return map_.width(); }
    int height() const { return map_.height(); }
    ImageDims dims() const { return map_.dims(); }

    Direction pixel_direction(int u, int v) const;

private:
    ImageF map_;
};

// Per-pixel solid angles for a 2:1 lat-long grid, row-major W*H:
//   omega(u,v) = sin(theta_v) * (pi/H) * (2*pi/W)
std::vector<double> solid_angle_map(ImageDims dims);

// Normalized angular footprint of one OLAT lighting bank:
// sum_p footprint(p) * omega(p) = 1, all values nonnegative.
struct BasisFootprint {
    int width = 0;
    int height = 0;
    std::vector<double> weights;

    ImageDims dims() const { return {width, height}; }
    double at(int u, int v) const { return weights[std::size_t(v) * width + u]; }
};

// Per-basis, per-channel projection coefficients of an environment.
struct LightingWeights {
    std::vector<std::array<double, 3>> values;

    int basis_count() const { return int(values.size()); }
    static LightingWeights zero(int n) { return {{std::size_t(n), {0, 0, 0}}}; }
    static LightingWeights one_hot(int n, int hot, double value = 1.0);
};

// Unwraps a mirror-ball photo into a lat-long map. For each output direction
// d, the ball is sampled at center + normalize(d + (0,0,1)) * radius.
LatLongMap mirrorball_to_latlong(const MirrorBall& ball, ImageDims out_dims);

// Luminance of the probe, thresholded at noise_floor * max, normalized so the
// solid-angle-weighted sum is one.
BasisFootprint footprint_from_probe(const LatLongMap& probe,
                                    double noise_floor = 0.05);

// w[k][c] = sum_p F_k(p) * env_c(p) * omega(p): the footprint-weighted
// average radiance each basis sees.
LightingWeights project_environment(const LatLongMap& env,
                                    const std::vector<BasisFootprint>& footprints);

// One single-pixel footprint per direction at the nearest lat-long pixel.
// Errors if two directions collide on one pixel.
std::vector<BasisFootprint> delta_footprints(const std::vector<Direction>& directions,
                                             ImageDims dims);

// Nearest lat-long pixel for a direction (round half up in u and v; u wraps).
void direction_to_pixel(Direction dir, ImageDims dims, int* u, int* v);

} // namespace olat
