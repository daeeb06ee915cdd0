// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#include "olat/stagesim.hpp"

#include <cmath>
#include <limits>

namespace olat {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Unit normal at a sphere pixel, or false when the pixel is background.
// World y is up while image rows grow downward.
bool sphere_normal(const SphereScene& scene, int x, int y, std::array<double, 3>* n)
{
    const double half_w = scene.dims.width / 2.0;
    const double half_h = scene.dims.height / 2.0;
    const double radius = scene.radius_frac * half_w;
    const double dx = (x + 0.5) - half_w;
    const double dy = half_h - (y + 0.5);
    const double rr = dx * dx + dy * dy;
    if (rr > radius * radius)
        return false;
    (*n)[0] = dx / radius;
    (*n)[1] = dy / radius;
    (*n)[2] = std::sqrt(std::max(0.0, 1.0 - rr / (radius * radius)));
    return true;
}

} // namespace

void SphereScene::validate() const
{
    if (!(radius_frac > 0.0 && radius_frac <= 1.0))
        fail(ErrorCode::InvalidArgument, "sphere radius fraction must be in (0, 1]");
    for (int c = 0; c < 3; ++c) {
        if (!(albedo[std::size_t(c)] >= 0.0 && albedo[std::size_t(c)] <= 1.0))
            fail(ErrorCode::InvalidArgument, "albedo must be in [0, 1]");
        if (!(ambient[std::size_t(c)] >= 0.0))
            fail(ErrorCode::InvalidArgument, "ambient must be >= 0");
    }
    if (dims.width < 1 || dims.height < 1)
        fail(ErrorCode::InvalidArgument, "scene dims must be >= 1x1");
}

ImageF render_olat(const SphereScene& scene, Direction light)
{
    scene.validate();
    const auto l = direction_to_unit(light);
    ImageF out(scene.dims.width, scene.dims.height, 0.0);
    for (int y = 0; y < scene.dims.height; ++y)
        for (int x = 0; x < scene.dims.width; ++x) {
            std::array<double, 3> n;
            if (!sphere_normal(scene, x, y, &n))
                continue;
            const double cosine =
                std::max(0.0, n[0] * l[0] + n[1] * l[1] + n[2] * l[2]);
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = scene.albedo[std::size_t(c)] * cosine +
                                  scene.ambient[std::size_t(c)];
        }
    return out;
}

ImageF render_env(const SphereScene& scene, const LatLongMap& env)
{
    scene.validate();
    const auto omega = solid_angle_map(env.dims());

    // Precompute directions once; the inner loop only does dot products.
    std::vector<std::array<double, 3>> dirs(omega.size());
    std::size_t i = 0;
    for (int v = 0; v < env.height(); ++v)
        for (int u = 0; u < env.width(); ++u, ++i)
            dirs[i] = direction_to_unit(env.pixel_direction(u, v));

    ImageF out(scene.dims.width, scene.dims.height, 0.0);
    for (int y = 0; y < scene.dims.height; ++y)
        for (int x = 0; x < scene.dims.width; ++x) {
            std::array<double, 3> n;
            if (!sphere_normal(scene, x, y, &n))
                continue;
            double acc[3] = {0.0, 0.0, 0.0};
            i = 0;
            for (int v = 0; v < env.height(); ++v)
                for (int u = 0; u < env.width(); ++u, ++i) {
                    const double cosine = n[0] * dirs[i][0] + n[1] * dirs[i][1] +
                                          n[2] * dirs[i][2];
                    if (cosine <= 0.0)
                        continue;
                    const double wgt = cosine * omega[i];
                    for (int c = 0; c < 3; ++c)
                        acc[c] += wgt * env.image().at(u, v, c);
                }
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = scene.ambient[std::size_t(c)] +
                                  scene.albedo[std::size_t(c)] * acc[c] / kPi;
        }
    return out;
}

MaskImage sphere_mask(const SphereScene& scene)
{
    scene.validate();
    MaskImage mask(scene.dims.width, scene.dims.height, 0.0);
    for (int y = 0; y < scene.dims.height; ++y)
        for (int x = 0; x < scene.dims.width; ++x) {
            std::array<double, 3> n;
            if (sphere_normal(scene, x, y, &n))
                mask.at(x, y) = 1.0;
        }
    return mask;
}

SimulatedDataset generate_dataset(const SphereScene& scene,
                                  const std::vector<Direction>& directions,
                                  ImageDims env_dims)
{
    scene.validate();
    if (directions.empty())
        fail(ErrorCode::InvalidArgument, "generate_dataset: no directions");

    SimulatedDataset out;
    out.directions = directions;
    out.footprints = delta_footprints(directions, env_dims);

    // Bank solid angles: nearest-direction partition of the env grid.
    std::vector<std::array<double, 3>> units(directions.size());
    for (std::size_t k = 0; k < directions.size(); ++k)
        units[k] = direction_to_unit(directions[k]);
    const auto omega = solid_angle_map(env_dims);
    out.bank_solid_angles.assign(directions.size(), 0.0);
    LatLongMap grid(env_dims.width, env_dims.height);
    std::size_t i = 0;
    for (int v = 0; v < env_dims.height; ++v)
        for (int u = 0; u < env_dims.width; ++u, ++i) {
            const auto d = direction_to_unit(grid.pixel_direction(u, v));
            std::size_t best = 0;
            double best_dot = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < units.size(); ++k) {
                const double dot =
                    d[0] * units[k][0] + d[1] * units[k][1] + d[2] * units[k][2];
                if (dot > best_dot) {
                    best_dot = dot;
                    best = k;
                }
            }
            out.bank_solid_angles[best] += omega[i];
        }

    // Ambient is forced to zero so the weighted OLAT sum does not multi-count it.
    SphereScene dark = scene;
    dark.ambient = {0.0, 0.0, 0.0};
    out.field.olats.reserve(directions.size());
    for (std::size_t k = 0; k < directions.size(); ++k) {
        ImageF olat = render_olat(dark, directions[k]);
        const double scale = out.bank_solid_angles[k] / kPi;
        for (double& v : olat.pixels())
            v *= scale;
        out.field.olats.push_back(std::move(olat));
    }
    return out;
}

std::vector<Direction> fibonacci_directions(int count)
{
    if (count < 1)
        fail(ErrorCode::InvalidArgument, "fibonacci_directions: count must be >= 1");
    std::vector<Direction> dirs;
    dirs.reserve(std::size_t(count));
    const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double theta = std::acos(std::clamp(z, -1.0, 1.0));
        double phi = std::fmod(golden_angle * i, 2.0 * kPi);
        if (phi >= kPi)
            phi -= 2.0 * kPi;
        dirs.push_back({theta, phi});
    }
    return dirs;
}

} // namespace olat
