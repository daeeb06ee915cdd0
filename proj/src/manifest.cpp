// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

#include "olat/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "atomic_file.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace olat {

namespace {

json parse_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::Io, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::Format, path + ": " + e.what());
    }
}

void write_json_file(const json& j, const std::string& path)
{
    detail::atomic_write_file(path, j.dump(2) + "\n");
}

// Resolves a manifest-relative path and requires it to exist.
std::string resolve_existing(const fs::path& base, const std::string& entry,
                             const std::string& what)
{
    if (entry.empty())
        fail(ErrorCode::Format, "manifest: empty path for " + what);
    fs::path p(entry);
    if (p.is_relative())
        p = base / p;
    p = p.lexically_normal();
    if (!fs::exists(p))
        fail(ErrorCode::Io, "manifest: missing " + what + ": " + p.string());
    return p.string();
}

int require_int(const json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_number_integer())
        fail(ErrorCode::Format, std::string("manifest: missing integer \"") + key + "\"");
    return j[key].get<int>();
}

std::string require_string(const json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_string())
        fail(ErrorCode::Format, std::string("manifest: missing string \"") + key + "\"");
    return j[key].get<std::string>();
}

} // namespace

void DatasetManifest::validate() const
{
    if (dims.width < 1 || dims.height < 1)
        fail(ErrorCode::Format, "manifest: dims must be >= 1x1");
    if (basis.empty())
        fail(ErrorCode::Format, "manifest: basis list is empty");
    for (std::size_t k = 0; k < basis.size(); ++k)
        if (basis[k].id != int(k))
            fail(ErrorCode::Format,
                 "manifest: basis ids must be dense 0.." +
                     std::to_string(basis.size() - 1) + ", got id " +
                     std::to_string(basis[k].id) + " at position " + std::to_string(k));
    for (const auto& ex : exemplars) {
        if (ex.pose.empty())
            fail(ErrorCode::Format, "manifest: exemplar with empty pose id");
        if (ex.olats.size() != basis.size())
            fail(ErrorCode::Format, "manifest: exemplar \"" + ex.pose + "\" has " +
                                        std::to_string(ex.olats.size()) +
                                        " olats, expected " +
                                        std::to_string(basis.size()));
    }
}

DatasetManifest load_manifest(const std::string& path)
{
    const json j = parse_json_file(path);
    if (!j.is_object())
        fail(ErrorCode::Format, path + ": manifest root must be an object");
    const fs::path base = fs::absolute(fs::path(path)).parent_path();

    DatasetManifest m;
    if (!j.contains("dims") || !j["dims"].is_object())
        fail(ErrorCode::Format, path + ": missing \"dims\" object");
    m.dims.width = require_int(j["dims"], "width");
    m.dims.height = require_int(j["dims"], "height");

    if (!j.contains("basis") || !j["basis"].is_array())
        fail(ErrorCode::Format, path + ": missing \"basis\" array");
    for (const auto& e : j["basis"]) {
        DatasetManifest::BasisEntry entry;
        entry.id = require_int(e, "id");
        entry.olat = require_string(e, "olat");
        entry.probe = require_string(e, "probe");
        m.basis.push_back(std::move(entry));
    }
    std::sort(m.basis.begin(), m.basis.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    if (j.contains("interview_probe"))
        m.interview_probe = require_string(j, "interview_probe");
    if (j.contains("mask_dir"))
        m.mask_dir = require_string(j, "mask_dir");

    if (j.contains("exemplars")) {
        if (!j["exemplars"].is_array())
            fail(ErrorCode::Format, path + ": \"exemplars\" must be an array");
        for (const auto& e : j["exemplars"]) {
            DatasetManifest::ExemplarEntry entry;
            entry.pose = require_string(e, "pose");
            if (!e.contains("olats") || !e["olats"].is_array())
                fail(ErrorCode::Format, path + ": exemplar missing \"olats\" array");
            for (const auto& p : e["olats"]) {
                if (!p.is_string())
                    fail(ErrorCode::Format, path + ": exemplar olat paths must be strings");
                entry.olats.push_back(p.get<std::string>());
            }
            if (e.contains("relit"))
                entry.relit = require_string(e, "relit");
            m.exemplars.push_back(std::move(entry));
        }
    }

    m.validate();

    for (auto& e : m.basis) {
        e.olat = resolve_existing(base, e.olat, "basis olat");
        e.probe = resolve_existing(base, e.probe, "basis probe");
    }
    if (!m.interview_probe.empty())
        m.interview_probe = resolve_existing(base, m.interview_probe, "interview probe");
    if (!m.mask_dir.empty()) {
        m.mask_dir = resolve_existing(base, m.mask_dir, "mask dir");
        if (!fs::is_directory(m.mask_dir))
            fail(ErrorCode::Io, "manifest: mask_dir is not a directory: " + m.mask_dir);
    }
    for (auto& ex : m.exemplars) {
        for (auto& p : ex.olats)
            p = resolve_existing(base, p, "exemplar \"" + ex.pose + "\" olat");
        if (!ex.relit.empty())
            ex.relit = resolve_existing(base, ex.relit, "exemplar \"" + ex.pose + "\" relit");
    }
    return m;
}

void save_manifest(const DatasetManifest& m, const std::string& path)
{
    m.validate();
    json j;
    j["dims"] = {{"width", m.dims.width}, {"height", m.dims.height}};
    j["basis"] = json::array();
    for (const auto& e : m.basis)
        j["basis"].push_back({{"id", e.id}, {"olat", e.olat}, {"probe", e.probe}});
    if (!m.interview_probe.empty())
        j["interview_probe"] = m.interview_probe;
    if (!m.mask_dir.empty())
        j["mask_dir"] = m.mask_dir;
    if (!m.exemplars.empty()) {
        j["exemplars"] = json::array();
        for (const auto& ex : m.exemplars) {
            json e = {{"pose", ex.pose}, {"olats", ex.olats}};
            if (!ex.relit.empty())
                e["relit"] = ex.relit;
            j["exemplars"].push_back(std::move(e));
        }
    }
    write_json_file(j, path);
}

ReflectanceField load_field(const DatasetManifest& m)
{
    m.validate();
    ReflectanceField field;
    field.olats.reserve(m.basis.size());
    for (const auto& e : m.basis) {
        ImageF img = load_image(e.olat);
        if (img.dims() != m.dims)
            fail(ErrorCode::DimensionMismatch,
                 e.olat + ": dims disagree with manifest");
        field.olats.push_back(std::move(img));
    }
    field.validate();
    return field;
}

std::vector<BasisFootprint> load_footprints(const DatasetManifest& m,
                                            double noise_floor)
{
    m.validate();
    std::vector<BasisFootprint> out;
    out.reserve(m.basis.size());
    ImageDims probe_dims{};
    for (const auto& e : m.basis) {
        LatLongMap probe(load_image(e.probe));
        if (out.empty())
            probe_dims = probe.dims();
        else if (probe.dims() != probe_dims)
            fail(ErrorCode::DimensionMismatch,
                 e.probe + ": probe dims disagree across the basis");
        out.push_back(footprint_from_probe(probe, noise_floor));
    }
    return out;
}

ExemplarSet load_exemplars(const DatasetManifest& m, const LightingWeights& w,
                           const DualGamma& g)
{
    m.validate();
    if (m.exemplars.empty())
        fail(ErrorCode::InvalidArgument, "manifest carries no exemplars");
    if (w.basis_count() != m.basis_count())
        fail(ErrorCode::DimensionMismatch, "weights basis count disagrees with manifest");
    ExemplarSet set;
    set.poses.reserve(m.exemplars.size());
    for (const auto& ex : m.exemplars) {
        ReflectanceField field;
        field.olats.reserve(ex.olats.size());
        for (const auto& p : ex.olats) {
            ImageF img = load_image(p);
            if (img.dims() != m.dims)
                fail(ErrorCode::DimensionMismatch, p + ": dims disagree with manifest");
            field.olats.push_back(std::move(img));
        }
        field = apply_dual_gamma(field, g);
        ImageF relit = ex.relit.empty() ? relight(field, w) : load_image(ex.relit);
        if (relit.dims() != m.dims)
            fail(ErrorCode::DimensionMismatch, ex.relit + ": dims disagree with manifest");
        set.poses.push_back({std::move(field), std::move(relit)});
    }
    set.validate();
    return set;
}

void save_field_dir(const ReflectanceField& field, const std::string& dir)
{
    field.validate();
    fs::create_directories(dir);
    for (int k = 0; k < field.count(); ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "olat_%03d.pfm", k);
        save_image(field.olats[std::size_t(k)], (fs::path(dir) / name).string());
    }
}

ReflectanceField load_field_dir(const std::string& dir)
{
    if (!fs::is_directory(dir))
        fail(ErrorCode::Io, "not a directory: " + dir);
    std::vector<std::pair<int, std::string>> entries;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.size() < 10 || name.rfind("olat_", 0) != 0 ||
            name.substr(name.size() - 4) != ".pfm")
            continue;
        const std::string digits = name.substr(5, name.size() - 9);
        if (digits.empty() ||
            !std::all_of(digits.begin(), digits.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            continue;
        entries.emplace_back(std::stoi(digits), e.path().string());
    }
    if (entries.empty())
        fail(ErrorCode::Io, "no olat_<k>.pfm files in " + dir);
    std::sort(entries.begin(), entries.end());
    ReflectanceField field;
    field.olats.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (entries[k].first != int(k))
            fail(ErrorCode::Format, dir + ": olat ids must be dense 0.." +
                                        std::to_string(entries.size() - 1));
        field.olats.push_back(load_image(entries[k].second));
    }
    field.validate();
    return field;
}

void save_weights(const LightingWeights& w, const std::string& path)
{
    if (w.basis_count() < 1)
        fail(ErrorCode::InvalidArgument, "weights: empty basis");
    json j;
    j["basis_count"] = w.basis_count();
    j["weights"] = json::array();
    for (int k = 0; k < w.basis_count(); ++k) {
        const auto& rgb = w.values[std::size_t(k)];
        j["weights"].push_back({{"id", k}, {"rgb", {rgb[0], rgb[1], rgb[2]}}});
    }
    write_json_file(j, path);
}

LightingWeights load_weights(const std::string& path)
{
    const json j = parse_json_file(path);
    if (!j.is_object() || !j.contains("basis_count") || !j.contains("weights") ||
        !j["weights"].is_array())
        fail(ErrorCode::Format, path + ": expected {basis_count, weights[]}");
    const int n = j["basis_count"].get<int>();
    if (n < 1 || j["weights"].size() != std::size_t(n))
        fail(ErrorCode::Format, path + ": basis_count disagrees with weights length");
    LightingWeights w = LightingWeights::zero(n);
    std::vector<bool> seen(std::size_t(n), false);
    for (const auto& e : j["weights"]) {
        const int id = require_int(e, "id");
        if (id < 0 || id >= n || seen[std::size_t(id)])
            fail(ErrorCode::Format, path + ": weight ids must be dense 0.." +
                                        std::to_string(n - 1));
        seen[std::size_t(id)] = true;
        if (!e.contains("rgb") || !e["rgb"].is_array() || e["rgb"].size() != 3)
            fail(ErrorCode::Format, path + ": weight entry needs a 3-element rgb");
        for (int c = 0; c < 3; ++c)
            w.values[std::size_t(id)][std::size_t(c)] = e["rgb"][std::size_t(c)].get<double>();
    }
    return w;
}

} // namespace olat
