// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#include "olat/probe.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

namespace olat {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_latlong_dims(ImageDims dims, const char* who)
{
    if (dims.width < 2 || dims.height < 1 || dims.width != 2 * dims.height)
        fail(ErrorCode::InvalidArgument,
             std::string(who) + ": lat-long dims must be 2:1, got " +
                 std::to_string(dims.width) + "x" + std::to_string(dims.height));
}

} // namespace

std::array<double, 3> direction_to_unit(Direction dir)
{
    const double st = std::sin(dir.theta);
    return {st * std::cos(dir.phi), std::cos(dir.theta), st * std::sin(dir.phi)};
}

void MirrorBall::validate() const
{
    if (radius <= 2.0)
        fail(ErrorCode::InvalidArgument, "mirror ball radius must exceed 2 px");
    if (center_x - radius < 0.0 || center_y - radius < 0.0 ||
        center_x + radius > image.width() || center_y + radius > image.height())
        fail(ErrorCode::InvalidArgument, "mirror ball circle exceeds image bounds");
}

LatLongMap::LatLongMap(ImageF map) : map_(std::move(map))
{
    check_latlong_dims(map_.dims(), "LatLongMap");
}

LatLongMap::LatLongMap(int width, int height, double fill)
    : map_(width, height, fill)
{
    check_latlong_dims(map_.dims(), "LatLongMap");
}

Direction LatLongMap::pixel_direction(int u, int v) const
{
    return {kPi * (v + 0.5) / height(), 2.0 * kPi * (u + 0.5) / width() - kPi};
}

std::vector<double> solid_angle_map(ImageDims dims)
{
    check_latlong_dims(dims, "solid_angle_map");
    std::vector<double> omega(std::size_t(dims.width) * dims.height);
    const double pixel_area = (kPi / dims.height) * (2.0 * kPi / dims.width);
    for (int v = 0; v < dims.height; ++v) {
        const double w = std::sin(kPi * (v + 0.5) / dims.height) * pixel_area;
        for (int u = 0; u < dims.width; ++u)
            omega[std::size_t(v) * dims.width + u] = w;
    }
    return omega;
}

LightingWeights LightingWeights::one_hot(int n, int hot, double value)
{
    LightingWeights w = zero(n);
    w.values[std::size_t(hot)] = {value, value, value};
    return w;
}

LatLongMap mirrorball_to_latlong(const MirrorBall& ball, ImageDims out_dims)
{
    check_latlong_dims(out_dims, "mirrorball_to_latlong");
    ball.validate();

    LatLongMap out(out_dims.width, out_dims.height);
    for (int v = 0; v < out_dims.height; ++v) {
        for (int u = 0; u < out_dims.width; ++u) {
            const auto d = direction_to_unit(out.pixel_direction(u, v));
            // Ball normal for the reflection that sends camera ray (0,0,1)
            // into direction d.
            double nx = d[0];
            double ny = d[1];
            double nz = d[2] + 1.0;
            const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
            if (len > 1e-9) {
                nx /= len;
                ny /= len;
            } else {
                // Exact backward pole: take rim radiance on the +x side.
                nx = 1.0;
                ny = 0.0;
            }
            const double sx = ball.center_x + nx * ball.radius;
            const double sy = ball.center_y + ny * ball.radius;
            for (int c = 0; c < 3; ++c)
                out.image().at(u, v, c) = bilinear_sample(ball.image, sx, sy, c);
        }
    }
    return out;
}

BasisFootprint footprint_from_probe(const LatLongMap& probe, double noise_floor)
{
    const int W = probe.width();
    const int H = probe.height();
    BasisFootprint fp;
    fp.width = W;
    fp.height = H;
    fp.weights.resize(std::size_t(W) * H);

    double max_lum = 0.0;
    for (int v = 0; v < H; ++v)
        for (int u = 0; u < W; ++u) {
            const double lum = 0.2126 * probe.image().at(u, v, 0) +
                               0.7152 * probe.image().at(u, v, 1) +
                               0.0722 * probe.image().at(u, v, 2);
            fp.weights[std::size_t(v) * W + u] = lum;
            max_lum = std::max(max_lum, lum);
        }

    const double threshold = noise_floor * max_lum;
    const auto omega = solid_angle_map(probe.dims());
    double mass = 0.0;
    for (std::size_t i = 0; i < fp.weights.size(); ++i) {
        if (fp.weights[i] < threshold)
            fp.weights[i] = 0.0;
        mass += fp.weights[i] * omega[i];
    }
    if (mass <= 0.0)
        fail(ErrorCode::InvalidArgument,
             "footprint_from_probe: probe is empty after thresholding");
    for (double& w : fp.weights)
        w /= mass;
    return fp;
}

LightingWeights project_environment(const LatLongMap& env,
                                    const std::vector<BasisFootprint>& footprints)
{
    const auto omega = solid_angle_map(env.dims());
    LightingWeights out = LightingWeights::zero(int(footprints.size()));
    for (std::size_t k = 0; k < footprints.size(); ++k) {
        const BasisFootprint& fp = footprints[k];
        if (fp.dims() != env.dims())
            fail(ErrorCode::DimensionMismatch,
                 "project_environment: footprint " + std::to_string(k) +
                     " dims differ from environment");
        double acc[3] = {0.0, 0.0, 0.0};
        std::size_t i = 0;
        for (int v = 0; v < env.height(); ++v)
            for (int u = 0; u < env.width(); ++u, ++i) {
                const double fw = fp.weights[i] * omega[i];
                if (fw == 0.0)
                    continue;
                for (int c = 0; c < 3; ++c)
                    acc[c] += fw * env.image().at(u, v, c);
            }
        out.values[k] = {acc[0], acc[1], acc[2]};
    }
    return out;
}

void direction_to_pixel(Direction dir, ImageDims dims, int* u, int* v)
{
    check_latlong_dims(dims, "direction_to_pixel");
    const double uf = (dir.phi + kPi) * dims.width / (2.0 * kPi) - 0.5;
    const double vf = dir.theta * dims.height / kPi - 0.5;
    int ui = int(std::floor(uf + 0.5));
    int vi = int(std::floor(vf + 0.5));
    ui = ((ui % dims.width) + dims.width) % dims.width;
    vi = std::clamp(vi, 0, dims.height - 1);
    *u = ui;
    *v = vi;
}

std::vector<BasisFootprint> delta_footprints(const std::vector<Direction>& directions,
                                             ImageDims dims)
{
    const auto omega = solid_angle_map(dims);
    std::vector<BasisFootprint> out;
    out.reserve(directions.size());
    std::set<std::pair<int, int>> used;
    for (std::size_t k = 0; k < directions.size(); ++k) {
        int u = 0, v = 0;
        direction_to_pixel(directions[k], dims, &u, &v);
        if (!used.insert({u, v}).second)
            fail(ErrorCode::InvalidArgument,
                 "delta_footprints: directions " + std::to_string(k) +
                     " collides with an earlier one at pixel (" +
                     std::to_string(u) + "," + std::to_string(v) + ")");
        BasisFootprint fp;
        fp.width = dims.width;
        fp.height = dims.height;
        fp.weights.assign(std::size_t(dims.width) * dims.height, 0.0);
        fp.weights[std::size_t(v) * dims.width + u] =
            1.0 / omega[std::size_t(v) * dims.width + u];
        out.push_back(std::move(fp));
    }
    return out;
}

} // namespace olat
