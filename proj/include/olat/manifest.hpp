// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "olat/estimate.hpp"
#include "olat/gamma.hpp"
#include "olat/probe.hpp"
#include "olat/relight.hpp"

namespace olat {

// On-disk description of an OLAT dataset (JSON). Paths are stored verbatim;
// load_manifest resolves relative entries against the manifest's directory
// and requires every referenced file to exist.
struct DatasetManifest {
    struct BasisEntry {
        int id = 0;
        std::string olat;
        std::string probe;
    };
    struct ExemplarEntry {
        std::string pose;
        std::vector<std::string> olats; // one per basis, ordered by id
        std::string relit;              // optional; synthesized when empty
    };

    ImageDims dims;
    std::vector<BasisEntry> basis; // ordered by id, ids dense 0..N-1
    std::string interview_probe;   // optional
    std::string mask_dir;          // optional
    std::vector<ExemplarEntry> exemplars;

    int basis_count() const { return int(basis.size()); }
    void validate() const;
};

DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& m, const std::string& path);

// The N basis OLAT images, ordered by id, checked against the manifest dims.
ReflectanceField load_field(const DatasetManifest& m);

// Per-basis probes converted to normalized footprints.
std::vector<BasisFootprint> load_footprints(const DatasetManifest& m,
                                            double noise_floor = 0.05);

// Exemplar poses with the dual gamma applied to each field; relit frames are
// taken from disk when the manifest names them, else rendered under w.
ExemplarSet load_exemplars(const DatasetManifest& m, const LightingWeights& w,
                           const DualGamma& g);

// A field as a directory of olat_<k>.pfm files with dense ids from zero.
void save_field_dir(const ReflectanceField& field, const std::string& dir);
ReflectanceField load_field_dir(const std::string& dir);

// Lighting weights as structured text for diffability.
void save_weights(const LightingWeights& w, const std::string& path);
LightingWeights load_weights(const std::string& path);

} // namespace olat
