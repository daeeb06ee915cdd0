// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "olat/gamma.hpp"
#include "olat/manifest.hpp"
#include "olat/stagesim.hpp"

namespace olat {

// Smooth, strictly positive random environment: a constant base plus a few
// cosine lobes with per-channel amplitudes. Deterministic in the seed.
LatLongMap random_smooth_env(ImageDims dims, std::uint32_t seed);

struct SimulateOptions {
    SphereScene scene;
    int basis_count = 41;
    ImageDims env_dims = {64, 32};
    int pose_count = 6;  // exemplar poses; pose 0 is the unmodified scene
    int frame_count = 4; // tracking frames; frame 0 is the unmodified scene
    std::uint32_t seed = 1234;
    DualGamma gamma; // camera curve baked into the frames

    void validate() const;
};

// Writes a complete synthetic dataset under out_dir:
//   olats/olat_<k>.pfm      basis OLATs (linear, solid-angle scaled)
//   probes/probe_<k>.pfm    single-pixel lat-long probes
//   interview.pfm           random smooth interview environment
//   frames/frame_<i>.pfm    tracking frames: the per-frame field relit under
//                           the interview lighting, then dual-gamma encoded
//   masks/frame_<i>.pfm     per-frame sphere masks
//   frames.txt, masks.txt   relative path lists, one per line
//   exemplars/pose_<p>/...  exemplar fields with varied radius and albedo
//   manifest.json           ties it all together (relative paths)
// Frames and exemplars reuse the basis directions; only the scene varies.
// Returns the manifest path.
std::string write_simulated_dataset(const SimulateOptions& opts,
                                    const std::string& out_dir);

} // namespace olat
