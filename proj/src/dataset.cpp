// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#include "olat/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "atomic_file.hpp"

namespace fs = std::filesystem;

namespace olat {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Uniform doubles straight from the mt19937 word stream; the standard
// distributions are implementation-defined and would break determinism
// across library versions.
struct Uniform {
    std::mt19937 rng;
    explicit Uniform(std::uint32_t seed) : rng(seed) {}
    double next() { return rng() * (1.0 / 4294967296.0); }
};

std::string numbered(const char* stem, int k, const char* ext)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%03d%s", stem, k, ext);
    return buf;
}

} // namespace

LatLongMap random_smooth_env(ImageDims dims, std::uint32_t seed)
{
    Uniform rnd(seed);
    double base[3];
    for (double& b : base)
        b = 0.2 + 0.3 * rnd.next();

    constexpr int kLobes = 3;
    struct Lobe {
        std::array<double, 3> axis;
        double sharpness;
        std::array<double, 3> amp;
    };
    std::array<Lobe, kLobes> lobes;
    for (auto& lobe : lobes) {
        const double z = 1.0 - 2.0 * rnd.next();
        const double phi = 2.0 * kPi * rnd.next();
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        lobe.axis = {s * std::cos(phi), z, s * std::sin(phi)};
        lobe.sharpness = 1.0 + 7.0 * rnd.next();
        for (double& a : lobe.amp)
            a = 0.2 + 0.8 * rnd.next();
    }

    LatLongMap env(dims.width, dims.height);
    for (int v = 0; v < dims.height; ++v)
        for (int u = 0; u < dims.width; ++u) {
            const auto d = direction_to_unit(env.pixel_direction(u, v));
            for (int c = 0; c < 3; ++c) {
                double val = base[c];
                for (const auto& lobe : lobes) {
                    const double dot = d[0] * lobe.axis[0] + d[1] * lobe.axis[1] +
                                       d[2] * lobe.axis[2];
                    val += lobe.amp[std::size_t(c)] *
                           std::pow(0.5 * (1.0 + dot), lobe.sharpness);
                }
                env.image().at(u, v, c) = val;
            }
        }
    return env;
}

void SimulateOptions::validate() const
{
    scene.validate();
    gamma.validate();
    if (basis_count < 1)
        fail(ErrorCode::InvalidArgument, "simulate: basis count must be >= 1");
    if (pose_count < 1 || frame_count < 1)
        fail(ErrorCode::InvalidArgument, "simulate: pose and frame counts must be >= 1");
}

std::string write_simulated_dataset(const SimulateOptions& opts,
                                    const std::string& out_dir)
{
    opts.validate();
    const fs::path out(out_dir);
    fs::create_directories(out / "olats");
    fs::create_directories(out / "probes");
    fs::create_directories(out / "frames");
    fs::create_directories(out / "masks");

    const auto directions = fibonacci_directions(opts.basis_count);
    const SimulatedDataset base =
        generate_dataset(opts.scene, directions, opts.env_dims);

    DatasetManifest m;
    m.dims = opts.scene.dims;
    for (int k = 0; k < opts.basis_count; ++k) {
        const std::string olat = "olats/" + numbered("olat", k, ".pfm");
        const std::string probe = "probes/" + numbered("probe", k, ".pfm");
        save_image(base.field.olats[std::size_t(k)], (out / olat).string());
        // Probe image: the delta footprint itself, gray. Normalization in
        // footprint_from_probe divides the value back out, so the round trip
        // reproduces the delta footprint.
        const BasisFootprint& fp = base.footprints[std::size_t(k)];
        ImageF probe_img(fp.width, fp.height, 0.0);
        for (int v = 0; v < fp.height; ++v)
            for (int u = 0; u < fp.width; ++u)
                for (int c = 0; c < 3; ++c)
                    probe_img.at(u, v, c) = fp.at(u, v);
        save_image(probe_img, (out / probe).string());
        m.basis.push_back({k, olat, probe});
    }

    const LatLongMap env = random_smooth_env(opts.env_dims, opts.seed);
    save_image(env.image(), (out / "interview.pfm").string());
    m.interview_probe = "interview.pfm";
    m.mask_dir = "masks";

    const LightingWeights w = project_environment(env, base.footprints);

    // Tracking frames: gentle radius motion, frame 0 untouched so the
    // manifest's basis field is exactly frame 0's field.
    std::string frames_list, masks_list;
    for (int i = 0; i < opts.frame_count; ++i) {
        SphereScene scene_i = opts.scene;
        // Non-periodic wobble: distinct radii for every frame after the first.
        const double factor = 1.0 + 0.05 * std::sin(1.7 * i);
        scene_i.radius_frac = std::min(1.0, scene_i.radius_frac * factor);
        const SimulatedDataset ds =
            generate_dataset(scene_i, directions, opts.env_dims);
        const ImageF frame = relight(apply_dual_gamma(ds.field, opts.gamma), w);
        const std::string frame_rel = "frames/" + numbered("frame", i, ".pfm");
        const std::string mask_rel = "masks/" + numbered("frame", i, ".pfm");
        save_image(frame, (out / frame_rel).string());
        save_mask(sphere_mask(scene_i), (out / mask_rel).string());
        frames_list += frame_rel + "\n";
        masks_list += mask_rel + "\n";
    }
    detail::atomic_write_file((out / "frames.txt").string(), frames_list);
    detail::atomic_write_file((out / "masks.txt").string(), masks_list);

    // Exemplar poses: pose 0 is the base scene, the rest vary radius and
    // albedo. Linear fields only; relit frames are synthesized at load.
    Uniform pose_rnd(opts.seed + 1);
    for (int p = 0; p < opts.pose_count; ++p) {
        SphereScene scene_p = opts.scene;
        if (p > 0) {
            scene_p.radius_frac =
                std::min(1.0, scene_p.radius_frac * (0.75 + 0.5 * pose_rnd.next()));
            for (double& a : scene_p.albedo)
                a = std::min(1.0, a * (0.6 + 0.6 * pose_rnd.next()));
        }
        const SimulatedDataset ds =
            generate_dataset(scene_p, directions, opts.env_dims);
        DatasetManifest::ExemplarEntry entry;
        char pose_name[32];
        std::snprintf(pose_name, sizeof(pose_name), "pose_%02d", p);
        entry.pose = pose_name;
        fs::create_directories(out / "exemplars" / pose_name);
        for (int k = 0; k < opts.basis_count; ++k) {
            const std::string rel =
                std::string("exemplars/") + pose_name + "/" + numbered("olat", k, ".pfm");
            save_image(ds.field.olats[std::size_t(k)], (out / rel).string());
            entry.olats.push_back(rel);
        }
        m.exemplars.push_back(std::move(entry));
    }

    const std::string manifest_path = (out / "manifest.json").string();
    save_manifest(m, manifest_path);
    return manifest_path;
}

} // namespace olat
