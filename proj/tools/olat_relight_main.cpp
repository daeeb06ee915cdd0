// Copyright (c) 2026 the olat-relight authors.
// SPDX-License-Identifier: Apache-2.0

// olat-relight: batch driver over the C library. Subcommands cover probe
// conversion, environment projection, relighting, gamma calibration,
// tracking-frame synthesis, per-frame field estimation, dataset simulation,
// and loss reporting. All flags are long-form.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "olat_relight.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// RAII over the C handles.
template <typename T, void (*Destroy)(T*)> class Handle {
public:
    Handle() = default;
    ~Handle() { reset(); }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& o) noexcept : p_(o.p_) { o.p_ = nullptr; }
    Handle& operator=(Handle&& o) noexcept
    {
        std::swap(p_, o.p_);
        return *this;
    }

    T** out()
    {
        reset();
        return &p_;
    }
    T* get() const { return p_; }
    explicit operator bool() const { return p_ != nullptr; }

private:
    void reset()
    {
        if (p_) {
            Destroy(p_);
            p_ = nullptr;
        }
    }
    T* p_ = nullptr;
};

using Image = Handle<olr_image, olr_image_destroy>;
using Mask = Handle<olr_mask, olr_mask_destroy>;
using Footprints = Handle<olr_footprints, olr_footprints_destroy>;
using Weights = Handle<olr_weights, olr_weights_destroy>;
using Field = Handle<olr_field, olr_field_destroy>;
using Exemplars = Handle<olr_exemplars, olr_exemplars_destroy>;
using Manifest = Handle<olr_manifest, olr_manifest_destroy>;

void check(olr_status st, const std::string& what)
{
    if (st != OLR_OK)
        throw std::runtime_error(what + ": " + olr_last_error());
}

// Plain-text key=value job configuration. Only the keys below exist; anything
// else is rejected by name.
const std::set<std::string>& known_config_keys()
{
    static const std::set<std::string> keys = {
        "lambda_prior", "blend_temperature", "iterations", "step_size",
        "solver",       "lambda1",           "lambda2",    "gamma_min",
        "gamma_max",    "noise_floor",       "output_format"};
    return keys;
}

class JobConfig {
public:
    void set(const std::string& key, const std::string& value)
    {
        if (!known_config_keys().count(key))
            throw std::runtime_error("unknown config key \"" + key + "\"");
        kv_[key] = value;
    }

    void parse_line(std::string line, const std::string& where)
    {
        if (const auto cr = line.find('\r'); cr != std::string::npos)
            line.erase(cr);
        const auto begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos || line[begin] == '#')
            return;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(where + ": expected key=value, got \"" + line + "\"");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            if (b == std::string::npos)
                return std::string();
            const auto e = s.find_last_not_of(" \t");
            return s.substr(b, e - b + 1);
        };
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    void load_file(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config file " + path);
        std::string line;
        while (std::getline(in, line))
            parse_line(line, path);
    }

    double get_double(const std::string& key, double fallback) const
    {
        const auto it = kv_.find(key);
        if (it == kv_.end())
            return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size())
                throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config key \"" + key + "\": expected a number, got \"" +
                                     it->second + "\"");
        }
    }

    int get_int(const std::string& key, int fallback) const
    {
        const auto it = kv_.find(key);
        if (it == kv_.end())
            return fallback;
        try {
            std::size_t pos = 0;
            const int v = std::stoi(it->second, &pos);
            if (pos != it->second.size())
                throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config key \"" + key + "\": expected an integer, got \"" +
                                     it->second + "\"");
        }
    }

    std::string get_choice(const std::string& key, const std::string& fallback,
                           const std::set<std::string>& allowed) const
    {
        const auto it = kv_.find(key);
        const std::string v = it == kv_.end() ? fallback : it->second;
        if (!allowed.count(v)) {
            std::string msg = "config key \"" + key + "\": expected one of";
            for (const auto& a : allowed)
                msg += " " + a;
            throw std::runtime_error(msg + ", got \"" + v + "\"");
        }
        return v;
    }

private:
    std::map<std::string, std::string> kv_;
};

// Shared --config/--set plumbing.
struct ConfigArgs {
    std::string config_file;
    std::vector<std::string> sets;

    JobConfig resolve() const
    {
        JobConfig cfg;
        if (!config_file.empty())
            cfg.load_file(config_file);
        for (const auto& s : sets)
            cfg.parse_line(s, "--set");
        return cfg;
    }
};

void add_config_flags(CLI::App* cmd, ConfigArgs* args)
{
    cmd->add_option("--config", args->config_file,
                    "Key=value config file (# comments allowed)");
    cmd->add_option("--set", args->sets, "Inline config override, key=value");
}

void write_text_atomic(const std::string& path, const std::string& text)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp + " for writing");
        out << text;
        out.flush();
        if (!out)
            throw std::runtime_error("write failed: " + tmp);
    }
    fs::rename(tmp, path);
}

void write_json_atomic(const std::string& path, const json& j)
{
    write_text_atomic(path, j.dump(2) + "\n");
}

// Path list file: one path per line, relative to the list's directory.
// `entry` keeps the line as written (for logs), `resolved` the loadable path.
struct ListedPath {
    std::string entry;
    std::string resolved;
};

std::vector<ListedPath> read_path_list(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open list file " + path);
    const fs::path base = fs::absolute(fs::path(path)).parent_path();
    std::vector<ListedPath> out;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto cr = line.find('\r'); cr != std::string::npos)
            line.erase(cr);
        if (line.empty())
            continue;
        fs::path p(line);
        if (p.is_relative())
            p = base / p;
        out.push_back({line, p.lexically_normal().string()});
    }
    if (out.empty())
        throw std::runtime_error("list file " + path + " is empty");
    return out;
}

std::string numbered(const char* stem, int k)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%03d", stem, k);
    return buf;
}

int default_jobs()
{
    if (const char* env = std::getenv("OLAT_RELIGHT_JOBS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1)
                return v;
        } catch (const std::exception&) {
        }
        throw std::runtime_error("OLAT_RELIGHT_JOBS must be a positive integer");
    }
    return 1;
}

Weights load_weights_arg(const std::string& path)
{
    Weights w;
    check(olr_weights_load(path.c_str(), w.out()), path);
    return w;
}

// Gamma pair from --gamma file and/or explicit values; explicit flags win.
struct GammaArgs {
    std::string file;
    std::optional<double> gamma1;
    std::optional<double> gamma2;

    void add_flags(CLI::App* cmd)
    {
        cmd->add_option("--gamma", file,
                        "JSON file with gamma1/gamma2 (as written by gamma-fit)");
        cmd->add_option("--gamma1", gamma1, "Dual-gamma exponent for the low range");
        cmd->add_option("--gamma2", gamma2, "Dual-gamma exponent for the high range");
    }

    bool any() const { return !file.empty() || gamma1 || gamma2; }

    std::pair<double, double> resolve() const
    {
        double g1 = 1.0, g2 = 1.0;
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in)
                throw std::runtime_error("cannot open gamma file " + file);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw std::runtime_error(file + ": " + e.what());
            }
            if (!j.contains("gamma1") || !j.contains("gamma2"))
                throw std::runtime_error(file + ": expected gamma1 and gamma2");
            g1 = j["gamma1"].get<double>();
            g2 = j["gamma2"].get<double>();
        }
        if (gamma1)
            g1 = *gamma1;
        if (gamma2)
            g2 = *gamma2;
        return {g1, g2};
    }
};

Mask ones_mask_like(const olr_image* img)
{
    int w = 0, h = 0;
    check(olr_image_dims(img, &w, &h), "image dims");
    Mask mask;
    check(olr_mask_create(w, h, 1.0, mask.out()), "mask create");
    return mask;
}

/* ---- probe -------------------------------------------------------------- */

struct ProbeArgs {
    std::string input, output;
    int width = 64, height = 32;
    double center_x = 0.0, center_y = 0.0, radius = 0.0;
};

void run_probe(const ProbeArgs& a)
{
    Image ball;
    check(olr_image_load(a.input.c_str(), ball.out()), a.input);
    Image latlong;
    check(olr_mirrorball_unwrap(ball.get(), a.center_x, a.center_y, a.radius,
                                a.width, a.height, latlong.out()),
          "mirror-ball unwrap");
    check(olr_image_save(latlong.get(), a.output.c_str()), a.output);
}

/* ---- project ------------------------------------------------------------ */

struct ProjectArgs {
    std::string manifest, env, output;
    ConfigArgs config;
};

void run_project(const ProjectArgs& a)
{
    const JobConfig cfg = a.config.resolve();
    Manifest m;
    check(olr_manifest_load(a.manifest.c_str(), m.out()), a.manifest);
    Image env;
    if (!a.env.empty())
        check(olr_image_load(a.env.c_str(), env.out()), a.env);
    else
        check(olr_manifest_interview_probe(m.get(), env.out()),
              "interview probe (pass --env or add one to the manifest)");
    Footprints fp;
    check(olr_manifest_footprints(m.get(), cfg.get_double("noise_floor", 0.05),
                                  fp.out()),
          "footprints");
    Weights w;
    check(olr_project_environment(env.get(), fp.get(), w.out()), "projection");
    check(olr_weights_save(w.get(), a.output.c_str()), a.output);
}

/* ---- relight ------------------------------------------------------------ */

struct RelightArgs {
    std::string field_dir, manifest, weights, env, output;
    GammaArgs gamma;
    ConfigArgs config;
};

void run_relight(const RelightArgs& a)
{
    const JobConfig cfg = a.config.resolve();
    if (a.field_dir.empty() == a.manifest.empty())
        throw std::runtime_error("pass exactly one of --field-dir and --manifest");
    if (a.weights.empty() == a.env.empty())
        throw std::runtime_error("pass exactly one of --weights and --env");
    if (!a.env.empty() && a.manifest.empty())
        throw std::runtime_error("--env needs --manifest for the basis probes");

    Manifest m;
    if (!a.manifest.empty())
        check(olr_manifest_load(a.manifest.c_str(), m.out()), a.manifest);

    Field field;
    if (!a.field_dir.empty())
        check(olr_field_load_dir(a.field_dir.c_str(), field.out()), a.field_dir);
    else
        check(olr_manifest_field(m.get(), field.out()), "basis field");

    Weights w;
    if (!a.weights.empty()) {
        w = load_weights_arg(a.weights);
    } else {
        Image env;
        check(olr_image_load(a.env.c_str(), env.out()), a.env);
        Footprints fp;
        check(olr_manifest_footprints(m.get(), cfg.get_double("noise_floor", 0.05),
                                      fp.out()),
              "footprints");
        check(olr_project_environment(env.get(), fp.get(), w.out()), "projection");
    }

    // Gamma only on request: the untouched path keeps one-hot relights
    // bit-exact.
    if (a.gamma.any()) {
        const auto [g1, g2] = a.gamma.resolve();
        Field encoded;
        check(olr_field_apply_dual_gamma(field.get(), g1, g2, encoded.out()),
              "dual gamma");
        field = std::move(encoded);
    }

    Image relit;
    check(olr_relight(field.get(), w.get(), relit.out()), "relight");
    check(olr_image_save(relit.get(), a.output.c_str()), a.output);
}

/* ---- gamma-fit ----------------------------------------------------------- */

struct GammaFitArgs {
    std::string manifest, weights, frame, mask, output;
    ConfigArgs config;
};

void run_gamma_fit(const GammaFitArgs& a)
{
    const JobConfig cfg = a.config.resolve();
    Manifest m;
    check(olr_manifest_load(a.manifest.c_str(), m.out()), a.manifest);
    Field field;
    check(olr_manifest_field(m.get(), field.out()), "basis field");
    Weights w = load_weights_arg(a.weights);
    Image frame;
    check(olr_image_load(a.frame.c_str(), frame.out()), a.frame);
    Mask mask;
    if (!a.mask.empty())
        check(olr_mask_load(a.mask.c_str(), mask.out()), a.mask);
    else
        mask = ones_mask_like(frame.get());

    double g1 = 0.0, g2 = 0.0, residual = 0.0;
    check(olr_fit_dual_gamma(field.get(), w.get(), frame.get(), mask.get(),
                             cfg.get_double("gamma_min", 0.2),
                             cfg.get_double("gamma_max", 5.0), &g1, &g2,
                             &residual),
          "gamma fit");

    const json j = {{"gamma1", g1}, {"gamma2", g2}, {"residual", residual}};
    write_json_atomic(a.output, j);
    std::cout << j.dump(2) << "\n";
}

/* ---- synth --------------------------------------------------------------- */

struct SynthArgs {
    std::string manifest, field_dir, weights, output;
    int pose = 0;
    GammaArgs gamma;
};

void run_synth(const SynthArgs& a)
{
    if (a.field_dir.empty() == a.manifest.empty())
        throw std::runtime_error("pass exactly one of --field-dir and --manifest");
    Field field;
    if (!a.field_dir.empty()) {
        check(olr_field_load_dir(a.field_dir.c_str(), field.out()), a.field_dir);
    } else {
        Manifest m;
        check(olr_manifest_load(a.manifest.c_str(), m.out()), a.manifest);
        check(olr_manifest_exemplar_field(m.get(), a.pose, field.out()),
              "exemplar pose " + std::to_string(a.pose));
    }
    Weights w = load_weights_arg(a.weights);
    const auto [g1, g2] = a.gamma.resolve();
    Image frame;
    check(olr_synth_tracking_frame(field.get(), w.get(), g1, g2, frame.out()),
          "synth");
    check(olr_image_save(frame.get(), a.output.c_str()), a.output);
}

/* ---- estimate ------------------------------------------------------------ */

struct EstimateArgs {
    std::string frames, masks, manifest, weights, output_dir;
    GammaArgs gamma;
    ConfigArgs config;
    int jobs = 0; // 0: default (env var or 1)
};

void run_estimate(const EstimateArgs& a)
{
    const JobConfig cfg = a.config.resolve();
    olr_estimate_options opts;
    olr_estimate_options_init(&opts);
    opts.lambda_prior = cfg.get_double("lambda_prior", opts.lambda_prior);
    opts.blend_temperature =
        cfg.get_double("blend_temperature", opts.blend_temperature);
    opts.iterations = cfg.get_int("iterations", opts.iterations);
    opts.step_size = cfg.get_double("step_size", opts.step_size);
    opts.use_iterative =
        cfg.get_choice("solver", "ridge", {"ridge", "iterative"}) == "iterative";
    opts.lambda1 = cfg.get_double("lambda1", opts.lambda1);
    opts.lambda2 = cfg.get_double("lambda2", opts.lambda2);
    const std::string preview_ext =
        cfg.get_choice("output_format", "pfm", {"pfm", "png"});

    const std::vector<ListedPath> frame_paths = read_path_list(a.frames);
    std::vector<ListedPath> mask_paths;
    if (!a.masks.empty()) {
        mask_paths = read_path_list(a.masks);
        if (mask_paths.size() != frame_paths.size())
            throw std::runtime_error("frame list and mask list lengths differ (" +
                                     std::to_string(frame_paths.size()) + " vs " +
                                     std::to_string(mask_paths.size()) + ")");
    }

    Manifest m;
    check(olr_manifest_load(a.manifest.c_str(), m.out()), a.manifest);
    Weights w = load_weights_arg(a.weights);
    const auto [g1, g2] = a.gamma.resolve();
    Exemplars ex;
    check(olr_manifest_exemplars(m.get(), w.get(), g1, g2, ex.out()), "exemplars");
    int pose_count = 0;
    check(olr_exemplars_count(ex.get(), &pose_count), "exemplars");

    fs::create_directories(a.output_dir);

    const int total = int(frame_paths.size());
    const std::size_t total_sz = frame_paths.size();
    std::vector<json> results(total_sz);
    std::vector<std::string> errors(total_sz);

    auto run_one = [&](int i) {
        Image frame;
        check(olr_image_load(frame_paths[std::size_t(i)].resolved.c_str(),
                             frame.out()),
              frame_paths[std::size_t(i)].resolved);
        Mask mask;
        if (!mask_paths.empty())
            check(olr_mask_load(mask_paths[std::size_t(i)].resolved.c_str(),
                                mask.out()),
                  mask_paths[std::size_t(i)].resolved);
        else
            mask = ones_mask_like(frame.get());

        std::vector<double> blend(std::size_t(pose_count), 0.0);
        std::vector<double> trace(std::size_t(opts.iterations) + 2, 0.0);
        int trace_len = 0;
        olr_frame_stats stats{};
        Field field;
        check(olr_estimate_frame(frame.get(), mask.get(), w.get(), ex.get(),
                                 &opts, field.out(), blend.data(), trace.data(),
                                 int(trace.size()), &trace_len, &stats),
              "estimate");

        const std::string frame_dir = numbered("frame", i);
        const fs::path dir = fs::path(a.output_dir) / frame_dir;
        check(olr_field_save_dir(field.get(), dir.string().c_str()),
              dir.string());
        Image relit;
        check(olr_relight(field.get(), w.get(), relit.out()), "preview relight");
        check(olr_image_save(relit.get(),
                             (dir / ("relit." + preview_ext)).string().c_str()),
              "preview");

        trace.resize(std::size_t(trace_len));
        json entry = {{"index", i},
                      {"frame", frame_paths[std::size_t(i)].entry},
                      {"field_dir", frame_dir},
                      {"temperature", stats.temperature},
                      {"residual_before", stats.residual_before},
                      {"residual_after", stats.residual_after},
                      {"blend", blend},
                      {"loss_trace", trace}};
        results[std::size_t(i)] = std::move(entry);
    };

    const int jobs = a.jobs > 0 ? a.jobs : default_jobs();
    if (jobs <= 1 || total <= 1) {
        for (int i = 0; i < total; ++i) {
            try {
                run_one(i);
            } catch (const std::exception& e) {
                errors[std::size_t(i)] = e.what();
            }
        }
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
                try {
                    run_one(i);
                } catch (const std::exception& e) {
                    errors[std::size_t(i)] = e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < jobs; ++t)
            pool.emplace_back(worker);
        worker();
        for (auto& t : pool)
            t.join();
    }

    bool failed = false;
    for (int i = 0; i < total; ++i)
        if (!errors[std::size_t(i)].empty()) {
            std::cerr << "frame " << i << ": " << errors[std::size_t(i)] << "\n";
            failed = true;
        }
    if (failed)
        throw std::runtime_error("estimate failed");

    json log;
    log["frames"] = json::array();
    for (auto& r : results)
        log["frames"].push_back(std::move(r));
    write_json_atomic((fs::path(a.output_dir) / "loss_trace.json").string(), log);
}

/* ---- simulate ------------------------------------------------------------ */

struct SimulateArgs {
    std::string output_dir;
    int count = 41;
    int env_width = 64, env_height = 32;
    int size = 64;
    double radius = 0.9;
    std::vector<double> albedo{0.8, 0.8, 0.8};
    std::vector<double> ambient{0.0, 0.0, 0.0};
    int poses = 6;
    int frames = 4;
    unsigned seed = 1234;
    double gamma1 = 1.0, gamma2 = 1.0;
};

void run_simulate(const SimulateArgs& a)
{
    olr_simulate_options opts;
    olr_simulate_options_init(&opts);
    for (int c = 0; c < 3; ++c) {
        opts.scene.albedo[c] = a.albedo[std::size_t(c)];
        opts.scene.ambient[c] = a.ambient[std::size_t(c)];
    }
    opts.scene.radius_frac = a.radius;
    opts.scene.width = a.size;
    opts.scene.height = a.size;
    opts.basis_count = a.count;
    opts.env_width = a.env_width;
    opts.env_height = a.env_height;
    opts.pose_count = a.poses;
    opts.frame_count = a.frames;
    opts.seed = a.seed;
    opts.gamma1 = a.gamma1;
    opts.gamma2 = a.gamma2;
    check(olr_simulate_dataset(&opts, a.output_dir.c_str()), a.output_dir);
    std::cout << (fs::path(a.output_dir) / "manifest.json").string() << "\n";
}

/* ---- loss ----------------------------------------------------------------- */

struct LossArgs {
    std::string pred_dir, gt_dir, frame, weights, mask;
    ConfigArgs config;
};

void run_loss(const LossArgs& a)
{
    const JobConfig cfg = a.config.resolve();
    Field pred;
    check(olr_field_load_dir(a.pred_dir.c_str(), pred.out()), a.pred_dir);
    Field gt;
    if (!a.gt_dir.empty())
        check(olr_field_load_dir(a.gt_dir.c_str(), gt.out()), a.gt_dir);
    Image frame;
    check(olr_image_load(a.frame.c_str(), frame.out()), a.frame);
    Weights w = load_weights_arg(a.weights);
    Mask mask;
    if (!a.mask.empty())
        check(olr_mask_load(a.mask.c_str(), mask.out()), a.mask);
    else
        mask = ones_mask_like(frame.get());

    // Without a ground-truth field the reconstruction term drops out.
    const double lambda1 = gt ? cfg.get_double("lambda1", 1.0) : 0.0;
    const double lambda2 = cfg.get_double("lambda2", 1.0);

    Image relit;
    check(olr_relight(pred.get(), w.get(), relit.out()), "relight");
    double rendering = 0.0;
    check(olr_rendering_loss(relit.get(), frame.get(), mask.get(), &rendering),
          "rendering loss");
    json j;
    if (gt) {
        double rec = 0.0;
        check(olr_reconstruction_loss(pred.get(), gt.get(), mask.get(), &rec),
              "reconstruction loss");
        j["reconstruction"] = rec;
    } else {
        j["reconstruction"] = nullptr;
    }
    double combined = 0.0;
    check(olr_combined_loss(pred.get(), gt.get(), frame.get(), w.get(),
                            mask.get(), lambda1, lambda2, &combined),
          "combined loss");
    j["rendering"] = rendering;
    j["combined"] = combined;
    std::cout << j.dump(2) << "\n";
}

CLI::App* add_command(CLI::App& app, const std::string& name,
                      const std::string& help)
{
    CLI::App* cmd = app.add_subcommand(name, help);
    cmd->set_help_flag("--help", "Print help");
    return cmd;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"OLAT reflectance-field video relighting"};
    app.set_help_flag("--help", "Print help");
    app.set_version_flag("--version", olr_version());
    app.require_subcommand(1);

    auto probe = std::make_shared<ProbeArgs>();
    {
        CLI::App* cmd = add_command(app, "probe",
                                    "Convert a mirror-ball photo to a lat-long map");
        cmd->add_option("--input", probe->input, "Mirror-ball image (PFM or PNG)")
            ->required();
        cmd->add_option("--output", probe->output, "Output lat-long PFM")->required();
        cmd->add_option("--width", probe->width, "Output width (2x height)");
        cmd->add_option("--height", probe->height, "Output height");
        cmd->add_option("--center-x", probe->center_x, "Ball center x (pixels)");
        cmd->add_option("--center-y", probe->center_y, "Ball center y (pixels)");
        cmd->add_option("--radius", probe->radius,
                        "Ball radius in pixels; omit for the largest inscribed circle");
        cmd->callback([probe] { run_probe(*probe); });
    }

    auto project = std::make_shared<ProjectArgs>();
    {
        CLI::App* cmd = add_command(app, "project",
                                    "Project an environment onto the OLAT basis");
        cmd->add_option("--manifest", project->manifest, "Dataset manifest")->required();
        cmd->add_option("--env", project->env,
                        "Lat-long environment PFM (default: manifest interview probe)");
        cmd->add_option("--output", project->output, "Output weights JSON")->required();
        add_config_flags(cmd, &project->config);
        cmd->callback([project] { run_project(*project); });
    }

    auto relight = std::make_shared<RelightArgs>();
    {
        CLI::App* cmd = add_command(app, "relight",
                                    "Render a field under lighting weights");
        cmd->add_option("--field-dir", relight->field_dir, "Field directory");
        cmd->add_option("--manifest", relight->manifest, "Dataset manifest");
        cmd->add_option("--weights", relight->weights, "Weights JSON");
        cmd->add_option("--env", relight->env,
                        "Lat-long environment to project on the fly (needs --manifest)");
        relight->gamma.add_flags(cmd);
        cmd->add_option("--output", relight->output, "Output image (PFM or PNG)")
            ->required();
        add_config_flags(cmd, &relight->config);
        cmd->callback([relight] { run_relight(*relight); });
    }

    auto gamma_fit = std::make_shared<GammaFitArgs>();
    {
        CLI::App* cmd = add_command(app, "gamma-fit",
                                    "Calibrate the dual-gamma curve against a frame");
        cmd->add_option("--manifest", gamma_fit->manifest, "Dataset manifest")->required();
        cmd->add_option("--weights", gamma_fit->weights, "Interview weights JSON")
            ->required();
        cmd->add_option("--frame", gamma_fit->frame, "Target frame image")->required();
        cmd->add_option("--mask", gamma_fit->mask, "Mask image (default all ones)");
        cmd->add_option("--output", gamma_fit->output, "Output gamma JSON")->required();
        add_config_flags(cmd, &gamma_fit->config);
        cmd->callback([gamma_fit] { run_gamma_fit(*gamma_fit); });
    }

    auto synth = std::make_shared<SynthArgs>();
    {
        CLI::App* cmd = add_command(app, "synth",
                                    "Synthesize a tracking frame from an exemplar");
        cmd->add_option("--manifest", synth->manifest, "Dataset manifest");
        cmd->add_option("--pose", synth->pose, "Exemplar pose index (with --manifest)");
        cmd->add_option("--field-dir", synth->field_dir, "Field directory");
        cmd->add_option("--weights", synth->weights, "Weights JSON")->required();
        synth->gamma.add_flags(cmd);
        cmd->add_option("--output", synth->output, "Output image")->required();
        cmd->callback([synth] { run_synth(*synth); });
    }

    auto estimate = std::make_shared<EstimateArgs>();
    {
        CLI::App* cmd = add_command(app, "estimate",
                                    "Estimate per-frame reflectance fields");
        cmd->add_option("--frames", estimate->frames, "Frame list file")->required();
        cmd->add_option("--masks", estimate->masks, "Mask list file");
        cmd->add_option("--manifest", estimate->manifest, "Dataset manifest")->required();
        cmd->add_option("--weights", estimate->weights, "Interview weights JSON")
            ->required();
        estimate->gamma.add_flags(cmd);
        cmd->add_option("--output-dir", estimate->output_dir, "Output directory")
            ->required();
        cmd->add_option("--jobs", estimate->jobs,
                        "Parallel frames (default OLAT_RELIGHT_JOBS or 1)");
        add_config_flags(cmd, &estimate->config);
        cmd->callback([estimate] { run_estimate(*estimate); });
    }

    auto simulate = std::make_shared<SimulateArgs>();
    {
        CLI::App* cmd = add_command(app, "simulate",
                                    "Write a synthetic light-stage dataset");
        cmd->add_option("--output-dir", simulate->output_dir, "Dataset directory")
            ->required();
        cmd->add_option("--count", simulate->count, "OLAT basis direction count");
        cmd->add_option("--env-width", simulate->env_width, "Environment width");
        cmd->add_option("--env-height", simulate->env_height, "Environment height");
        cmd->add_option("--size", simulate->size, "Square render size in pixels");
        cmd->add_option("--radius", simulate->radius, "Sphere radius fraction");
        cmd->add_option("--albedo", simulate->albedo, "Sphere albedo (three values)")
            ->expected(3);
        cmd->add_option("--ambient", simulate->ambient, "Ambient term (three values)")
            ->expected(3);
        cmd->add_option("--poses", simulate->poses, "Exemplar pose count");
        cmd->add_option("--frames", simulate->frames, "Tracking frame count");
        cmd->add_option("--seed", simulate->seed, "Random seed");
        cmd->add_option("--gamma1", simulate->gamma1, "Camera curve gamma1");
        cmd->add_option("--gamma2", simulate->gamma2, "Camera curve gamma2");
        cmd->callback([simulate] { run_simulate(*simulate); });
    }

    auto loss = std::make_shared<LossArgs>();
    {
        CLI::App* cmd = add_command(app, "loss", "Report losses for a field");
        cmd->add_option("--pred-dir", loss->pred_dir, "Predicted field directory")
            ->required();
        cmd->add_option("--gt-dir", loss->gt_dir, "Ground-truth field directory");
        cmd->add_option("--frame", loss->frame, "Target frame image")->required();
        cmd->add_option("--weights", loss->weights, "Weights JSON")->required();
        cmd->add_option("--mask", loss->mask, "Mask image (default all ones)");
        add_config_flags(cmd, &loss->config);
        cmd->callback([loss] { run_loss(*loss); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "olat-relight: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
