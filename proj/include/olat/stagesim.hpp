// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "olat/probe.hpp"
#include "olat/relight.hpp"

namespace olat {

// Procedural Lambertian sphere under an orthographic camera. The image y
// axis runs downward, world y upward, so colatitude 0 lights the top rows.
struct SphereScene {
    std::array<double, 3> albedo = {0.8, 0.8, 0.8};
    std::array<double, 3> ambient = {0.0, 0.0, 0.0};
    double radius_frac = 0.9; // of the image half-width
    ImageDims dims = {64, 64};

    void validate() const;
};

// Single directional light of unit irradiance:
//   radiance = albedo * max(0, n . l) + ambient  inside the sphere, 0 outside.
ImageF render_olat(const SphereScene& scene, Direction light);

// Brute-force integration over every environment pixel:
//   radiance = ambient + albedo/pi * sum_p env(p) * max(0, n . d(p)) * omega(p)
ImageF render_env(const SphereScene& scene, const LatLongMap& env);

// Circle-of-interest mask for a scene (1 inside the sphere, 0 outside).
MaskImage sphere_mask(const SphereScene& scene);

struct SimulatedDataset {
    ReflectanceField field;
    std::vector<BasisFootprint> footprints;
    std::vector<Direction> directions;
    std::vector<double> bank_solid_angles; // one per basis
};

// Synthetic OLAT capture: each basis image is render_olat(dir_k) (ambient
// forced to zero) scaled by bank_solid_angle_k / pi, where the bank solid
// angle is direction k's share of the env grid (nearest-direction
// partition). With delta footprints this makes
//   relight(field, project_environment(env, footprints))
// a quadrature of render_env(env) that tightens as the basis count grows.
SimulatedDataset generate_dataset(const SphereScene& scene,
                                  const std::vector<Direction>& directions,
                                  ImageDims env_dims);

// Evenly distributed unit directions (golden-angle spiral), poles avoided.
std::vector<Direction> fibonacci_directions(int count);

} // namespace olat
