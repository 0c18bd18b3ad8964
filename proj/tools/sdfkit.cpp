// Command-line front end: sample-data, train, reconstruct, recover, eval.
// Exit codes: 0 = success, 1 = at least one shape failed, 2 = bad usage or
// config. Every output directory receives run-config.ini with the effective
// settings; binary artifacts embed the config hash and seed themselves.
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sdfkit/data/generate.hpp"
#include "sdfkit/data/manifest.hpp"
#include "sdfkit/data/samples.hpp"
#include "sdfkit/extract/grid.hpp"
#include "sdfkit/extract/marching_cubes.hpp"
#include "sdfkit/geom/analytic.hpp"
#include "sdfkit/geom/mesh.hpp"
#include "sdfkit/geom/mesh_io.hpp"
#include "sdfkit/geom/sampling.hpp"
#include "sdfkit/infer/latent_fit.hpp"
#include "sdfkit/metrics/metrics.hpp"
#include "sdfkit/train/checkpoint.hpp"
#include "sdfkit/train/schedule.hpp"
#include "sdfkit/train/trainer.hpp"
#include "sdfkit/util/hash.hpp"
#include "sdfkit/util/ini.hpp"
#include "sdfkit/util/rng.hpp"

namespace fs = std::filesystem;
using namespace sdfkit;

namespace {

// Errors the user can only fix by changing flags or the config file.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%016" PRIx64, v);
    return buf;
}

IniFile load_config_file(const std::string& path) {
    if (path.empty()) return IniFile{};
    if (!fs::exists(path)) throw UsageError("config file not found: " + path);
    try {
        return IniFile::load(path);
    } catch (const std::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

IniSection& section(IniFile& ini, std::string_view name) {
    if (IniSection* s = ini.find_section(name)) return *s;
    return ini.add_section(name);
}

// ---- config digestion: read with defaults, then write the effective value
// back so the serialized config (and its hash) is canonical -----------------

SamplingConfig digest_sampling(IniFile& ini, std::uint64_t seed) {
    SamplingConfig c;
    c.seed = seed;
    IniSection& s = section(ini, "sampling");
    c.count = std::size_t(s.get_int("count", (long long)c.count));
    c.near_fraction_1 = s.get_double("near_fraction_1", c.near_fraction_1);
    c.near_fraction_2 = s.get_double("near_fraction_2", c.near_fraction_2);
    c.uniform_fraction = s.get_double("uniform_fraction", c.uniform_fraction);
    c.noise_std_1 = s.get_double("noise_std_1", c.noise_std_1);
    c.noise_std_2 = s.get_double("noise_std_2", c.noise_std_2);
    c.proxy_resolution = int(s.get_int("proxy_resolution", c.proxy_resolution));
    s.set("count", std::to_string(c.count));
    s.set("near_fraction_1", format_double(c.near_fraction_1));
    s.set("near_fraction_2", format_double(c.near_fraction_2));
    s.set("uniform_fraction", format_double(c.uniform_fraction));
    s.set("noise_std_1", format_double(c.noise_std_1));
    s.set("noise_std_2", format_double(c.noise_std_2));
    s.set("proxy_resolution", std::to_string(c.proxy_resolution));
    return c;
}

TrainConfig digest_train(IniFile& ini, std::uint64_t seed) {
    TrainConfig c;
    c.seed = seed;
    IniSection& s = section(ini, "train");
    c.latent_dim = int(s.get_int("latent_dim", c.latent_dim));
    c.hidden_width = int(s.get_int("hidden_width", c.hidden_width));
    c.latent_init_std = s.get_double("latent_init_std", c.latent_init_std);
    c.shapes_per_step = int(s.get_int("shapes_per_step", c.shapes_per_step));
    c.points_per_shape_per_step =
        int(s.get_int("points_per_shape_per_step", c.points_per_shape_per_step));
    c.points_per_shape_per_epoch =
        int(s.get_int("points_per_shape_per_epoch", c.points_per_shape_per_epoch));
    c.lr_network = s.get_double("lr_network", c.lr_network);
    c.lr_latent = s.get_double("lr_latent", c.lr_latent);
    c.sigma = s.get_double("sigma", c.sigma);
    c.delta = s.get_double("delta", c.delta);
    c.optimizer = s.get("optimizer", c.optimizer);
    c.checkpoint_every = int(s.get_int("checkpoint_every", c.checkpoint_every));
    s.set("latent_dim", std::to_string(c.latent_dim));
    s.set("hidden_width", std::to_string(c.hidden_width));
    s.set("latent_init_std", format_double(c.latent_init_std));
    s.set("shapes_per_step", std::to_string(c.shapes_per_step));
    s.set("points_per_shape_per_step", std::to_string(c.points_per_shape_per_step));
    s.set("points_per_shape_per_epoch", std::to_string(c.points_per_shape_per_epoch));
    s.set("lr_network", format_double(c.lr_network));
    s.set("lr_latent", format_double(c.lr_latent));
    s.set("sigma", format_double(c.sigma));
    s.set("delta", format_double(c.delta));
    s.set("optimizer", c.optimizer);
    s.set("checkpoint_every", std::to_string(c.checkpoint_every));
    return c;
}

InferenceConfig digest_inference(IniFile& ini, std::uint64_t seed) {
    InferenceConfig c;
    c.seed = seed;
    IniSection& s = section(ini, "inference");
    c.iterations = int(s.get_int("iterations", c.iterations));
    c.lr = s.get_double("lr", c.lr);
    c.lr_drop_at = int(s.get_int("lr_drop_at", c.lr_drop_at));
    c.lr_drop_factor = s.get_double("lr_drop_factor", c.lr_drop_factor);
    c.sigma = s.get_double("sigma", c.sigma);
    c.delta = s.get_double("delta", c.delta);
    c.epsilon = s.get_double("epsilon", c.epsilon);
    c.lambda = s.get_double("lambda", c.lambda);
    c.restarts = int(s.get_int("restarts", c.restarts));
    c.points_per_iter = int(s.get_int("points_per_iter", c.points_per_iter));
    c.eval_every = int(s.get_int("eval_every", c.eval_every));
    c.init_std = s.get_double("init_std", c.init_std);
    s.set("iterations", std::to_string(c.iterations));
    s.set("lr", format_double(c.lr));
    s.set("lr_drop_at", std::to_string(c.lr_drop_at));
    s.set("lr_drop_factor", format_double(c.lr_drop_factor));
    s.set("sigma", format_double(c.sigma));
    s.set("delta", format_double(c.delta));
    s.set("epsilon", format_double(c.epsilon));
    s.set("lambda", format_double(c.lambda));
    s.set("restarts", std::to_string(c.restarts));
    s.set("points_per_iter", std::to_string(c.points_per_iter));
    s.set("eval_every", std::to_string(c.eval_every));
    s.set("init_std", format_double(c.init_std));
    return c;
}

struct ExtractSettings {
    int resolution = 128;
    double bound = 1.1;
};

ExtractSettings digest_extract(IniFile& ini) {
    ExtractSettings c;
    IniSection& s = section(ini, "extract");
    c.resolution = int(s.get_int("resolution", c.resolution));
    c.bound = s.get_double("bound", c.bound);
    s.set("resolution", std::to_string(c.resolution));
    s.set("bound", format_double(c.bound));
    if (c.resolution < 2) throw UsageError("extract: resolution must be at least 2");
    if (!(c.bound > 0.0)) throw UsageError("extract: bound must be positive");
    return c;
}

struct EvalSettings {
    EvalProtocol proto;
    int gt_resolution = 192;  // iso-surface grid for analytic ground truth
};

EvalSettings digest_eval(IniFile& ini, std::uint64_t seed) {
    EvalSettings c;
    c.proto.seed = seed;
    IniSection& s = section(ini, "eval");
    c.proto.cd_points = int(s.get_int("cd_points", c.proto.cd_points));
    c.proto.emd_points = int(s.get_int("emd_points", c.proto.emd_points));
    c.proto.accuracy_points = int(s.get_int("accuracy_points", c.proto.accuracy_points));
    c.proto.squared_cd = s.get_bool("squared_cd", c.proto.squared_cd);
    c.gt_resolution = int(s.get_int("gt_resolution", c.gt_resolution));
    s.set("cd_points", std::to_string(c.proto.cd_points));
    s.set("emd_points", std::to_string(c.proto.emd_points));
    s.set("accuracy_points", std::to_string(c.proto.accuracy_points));
    s.set("squared_cd", c.proto.squared_cd ? "true" : "false");
    s.set("gt_resolution", std::to_string(c.gt_resolution));
    return c;
}

// ---- shared building blocks ------------------------------------------------

GridBounds bounds_from(double bound) {
    GridBounds b;
    b.lo = {-bound, -bound, -bound};
    b.hi = {bound, bound, bound};
    return b;
}

bool is_mesh_source(const std::string& source) { return source.rfind("mesh ", 0) == 0; }

TriangleMesh load_source_mesh(const std::string& source, const std::string& search_dir) {
    const std::string path = trim(source.substr(5));
    std::string resolved = path;
    if (!fs::exists(resolved) && !search_dir.empty() && fs::path(path).is_relative())
        resolved = (fs::path(search_dir) / path).string();
    if (!fs::exists(resolved)) throw UsageError("mesh source not found: " + path);
    return normalize_to_unit_sphere(load_obj(resolved)).mesh;
}

// Ground truth surface for a manifest entry: the referenced mesh (normalized
// the same way sample generation normalizes it) or an iso-surface of the
// analytic oracle.
TriangleMesh ground_truth_mesh(const ManifestEntry& entry, const std::string& manifest_dir,
                               int gt_resolution, int jobs) {
    if (is_mesh_source(entry.source)) return load_source_mesh(entry.source, manifest_dir);
    const AnalyticShape shape = parse_analytic_shape(entry.source);
    const ScalarGrid grid = evaluate_grid(
        [&](const Vec3& p) { return signed_distance(shape, p); }, GridBounds{}, gt_resolution,
        jobs);
    TriangleMesh mesh = marching_cubes(grid, 0.0);
    if (mesh.empty())
        throw std::runtime_error("ground truth for " + entry.id + " produced an empty surface");
    return mesh;
}

std::vector<const ManifestEntry*> pick_split(const DatasetManifest& manifest,
                                             const std::string& split) {
    std::vector<const ManifestEntry*> entries;
    if (split == "all") {
        for (const auto& e : manifest.entries) entries.push_back(&e);
    } else if (split == "train" || split == "test") {
        entries = manifest.split_entries(split);
    } else {
        throw UsageError("unknown split '" + split + "' (expected train, test or all)");
    }
    if (entries.empty()) throw UsageError("manifest has no shapes with split=" + split);
    return entries;
}

DatasetManifest load_manifest_checked(const std::string& path) {
    if (!fs::exists(path)) throw UsageError("manifest not found: " + path);
    try {
        return load_manifest(path);
    } catch (const std::exception& e) {
        throw UsageError(std::string("manifest: ") + e.what());
    }
}

ShapeSamples load_entry_samples(const ManifestEntry& entry) {
    ShapeSamples s = load_samples(entry.file);
    s.shape_id = entry.id;
    s.source = entry.source;
    return s;
}

std::vector<std::string> artifact_comments(std::uint64_t config_hash, std::uint64_t seed) {
    return {"config " + hex64(config_hash) + " seed " + std::to_string(seed),
            "vertex weld tolerance 1e-7"};
}

// ---- commands ---------------------------------------------------------------

// value + "was it passed" pairs, since flags must win over the config file
template <typename T>
struct Override {
    T value{};
    CLI::Option* opt = nullptr;
    std::optional<T> get() const {
        return (opt && opt->count() > 0) ? std::optional<T>(value) : std::nullopt;
    }
};

struct CommonArgs {
    std::string config_path;
    std::string out;
    Override<std::uint64_t> seed;
    Override<int> jobs;
};

struct Effective {
    IniFile ini;
    std::uint64_t seed = 0;
    int jobs = 1;
};

Effective begin_command(const CommonArgs& args) {
    Effective e;
    e.ini = load_config_file(args.config_path);
    const auto seed = args.seed.get();
    const auto jobs = args.jobs.get();
    e.seed = seed ? *seed : e.ini.global.get_u64("seed", 0);
    e.jobs = jobs ? *jobs : int(e.ini.global.get_int("jobs", 1));
    if (e.jobs < 1) throw UsageError("--jobs must be at least 1");
    e.ini.global.set("seed", std::to_string(e.seed));
    e.ini.global.set("jobs", std::to_string(e.jobs));
    return e;
}

std::uint64_t finalize_config(Effective& e, const std::string& out_dir) {
    const std::uint64_t hash = fnv1a64(e.ini.serialize());
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        e.ini.save(out_dir + "/run-config.ini");
    }
    return hash;
}

int cmd_sample_data(const CommonArgs& args) {
    Effective e = begin_command(args);
    SamplingConfig scfg;
    try {
        scfg = digest_sampling(e.ini, e.seed);
        scfg.validate();
    } catch (const std::exception& ex) {
        throw UsageError(std::string("sampling config: ") + ex.what());
    }

    struct ShapeDecl {
        std::string id, source, split;
    };
    std::vector<ShapeDecl> decls;
    for (const IniSection* sec : e.ini.sections_named("shape")) {
        ShapeDecl d;
        d.id = trim(sec->arg);
        if (d.id.empty()) throw UsageError("[shape] sections need a name: [shape <id>]");
        d.source = trim(sec->require("source"));
        d.split = sec->get("split", "train");
        if (d.split != "train" && d.split != "test")
            throw UsageError("shape " + d.id + ": split must be train or test");
        for (const auto& other : decls)
            if (other.id == d.id) throw UsageError("duplicate shape id: " + d.id);
        decls.push_back(std::move(d));
    }
    if (decls.empty()) throw UsageError("config declares no [shape <id>] sections");
    // fail fast on any missing referenced mesh before heavy work starts
    for (const auto& d : decls)
        if (is_mesh_source(d.source)) {
            const std::string p = trim(d.source.substr(5));
            if (!fs::exists(p)) throw UsageError("shape " + d.id + ": mesh source not found: " + p);
        } else {
            try {
                parse_analytic_shape(d.source);
            } catch (const std::exception& ex) {
                throw UsageError("shape " + d.id + ": " + ex.what());
            }
        }

    const std::uint64_t config_hash = finalize_config(e, args.out);

    DatasetManifest manifest;
    manifest.sampling = scfg;
    manifest.config_hash = config_hash;
    manifest.seed = e.seed;
    int failures = 0;

    for (const auto& d : decls) {
        try {
            ShapeSamples samples;
            if (is_mesh_source(d.source)) {
                const TriangleMesh mesh =
                    normalize_to_unit_sphere(load_obj(trim(d.source.substr(5)))).mesh;
                samples = generate_samples(mesh, d.id, scfg);
            } else {
                samples = generate_samples(parse_analytic_shape(d.source), d.id, scfg);
            }
            const std::string file = d.id + ".sdfs";
            save_samples(samples, args.out + "/" + file);

            std::size_t near = 0;
            for (const SdfSample& p : samples.samples)
                if (std::fabs(p.s) < 0.05) ++near;
            std::cout << d.id << ": " << samples.size() << " samples, near-surface fraction "
                      << double(near) / double(samples.size()) << ", file " << file << "\n";

            ManifestEntry entry;
            entry.id = d.id;
            entry.file = file;
            entry.source = d.source;
            entry.split = d.split;
            entry.count = samples.size();
            entry.seed = derive_seed(scfg.seed, "samples", fnv1a64(d.id));
            manifest.entries.push_back(std::move(entry));
        } catch (const std::exception& ex) {
            ++failures;
            std::cerr << "shape " << d.id << " failed: " << ex.what() << "\n";
        }
    }

    if (!manifest.entries.empty()) save_manifest(manifest, args.out + "/manifest.ini");
    if (failures > 0) {
        std::cerr << failures << "/" << decls.size() << " shapes failed\n";
        return 1;
    }
    std::cout << "manifest: " << args.out << "/manifest.ini (config " << hex64(config_hash)
              << ")\n";
    return 0;
}

CurriculumSchedule build_schedule(const std::string& selector, int total_epochs) {
    if (selector == "curriculum") return default_schedule(total_epochs);
    if (selector == "baseline") return flat_schedule(total_epochs, 8, 0.0, 0.0);
    if (!fs::exists(selector))
        throw UsageError("schedule must be 'curriculum', 'baseline' or a schedule file; '" +
                         selector + "' is none of these");
    CurriculumSchedule s = load_schedule(selector);
    if (s.total_epochs != total_epochs) s = scale_schedule(s, total_epochs);
    return s;
}

int cmd_train(const CommonArgs& args, const std::string& data_path,
              const std::string& resume_path, const std::optional<std::string>& schedule_flag,
              std::optional<int> epochs_flag) {
    Effective e = begin_command(args);

    IniSection& tsec = section(e.ini, "train");
    const std::string schedule_sel =
        schedule_flag ? *schedule_flag : tsec.get("schedule", "curriculum");
    const int total_epochs =
        epochs_flag ? *epochs_flag : int(tsec.get_int("total_epochs", 300));
    tsec.set("schedule", schedule_sel);
    tsec.set("total_epochs", std::to_string(total_epochs));

    TrainConfig tcfg;
    CurriculumSchedule schedule;
    try {
        tcfg = digest_train(e.ini, e.seed);
        tcfg.validate();
        schedule = build_schedule(schedule_sel, total_epochs);
        schedule.validate();
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& ex) {
        throw UsageError(std::string("train config: ") + ex.what());
    }

    const DatasetManifest manifest = load_manifest_checked(data_path);
    const auto entries = pick_split(manifest, "train");
    std::vector<ShapeSamples> shapes;
    shapes.reserve(entries.size());
    for (const ManifestEntry* entry : entries) shapes.push_back(load_entry_samples(*entry));

    const std::uint64_t config_hash = finalize_config(e, args.out);
    tcfg.config_hash = config_hash;
    save_schedule(schedule, args.out + "/schedule.ini");

    std::optional<TrainState> resume;
    if (!resume_path.empty()) {
        if (!fs::exists(resume_path)) throw UsageError("checkpoint not found: " + resume_path);
        resume = load_checkpoint(resume_path);
        std::cout << "resuming at epoch " << resume->epochs_done << "\n";
    }

    std::cout << "training " << shapes.size() << " shapes for " << schedule.total_epochs
              << " epochs (schedule " << schedule_sel << ", config " << hex64(config_hash)
              << ", seed " << e.seed << ")\n";
    const TrainResult result =
        train(shapes, schedule, tcfg, args.out, resume ? &*resume : nullptr, &std::cerr);

    if (!result.log.empty()) {
        const TrainLogRow& last = result.log.back();
        std::cout << "done: epoch " << last.epoch << " mean_loss " << format_double(last.mean_loss)
                  << " hard " << format_double(last.frac_hard) << "\n";
    } else {
        std::cout << "done: checkpoint was already at " << schedule.total_epochs << " epochs\n";
    }
    std::cout << "checkpoint: " << args.out << "/checkpoint.bin\n";
    return 0;
}

void save_latents_ini(const std::string& path, const std::vector<std::string>& ids,
                      const std::vector<LatentFitResult>& fits, std::uint64_t config_hash,
                      std::uint64_t seed) {
    IniFile out;
    out.global.set("version", "1");
    out.global.set("config_hash", hex64(config_hash));
    out.global.set("seed", std::to_string(seed));
    for (std::size_t i = 0; i < ids.size(); ++i) {
        IniSection& s = out.add_section("latent", ids[i]);
        s.set("objective", format_double(fits[i].objective));
        s.set("iteration", std::to_string(fits[i].best_iteration));
        s.set("restart", std::to_string(fits[i].best_restart));
        std::string values;
        char buf[40];
        for (float v : fits[i].z) {
            std::snprintf(buf, sizeof buf, "%.9g", double(v));
            if (!values.empty()) values += ' ';
            values += buf;
        }
        s.set("values", values);
    }
    out.save(path);
}

int cmd_reconstruct(const CommonArgs& args, const std::string& checkpoint_path,
                    const std::string& data_path, const std::string& split,
                    std::optional<int> resolution_flag, std::optional<int> iterations_flag) {
    Effective e = begin_command(args);
    if (resolution_flag) section(e.ini, "extract").set("resolution", std::to_string(*resolution_flag));
    if (iterations_flag)
        section(e.ini, "inference").set("iterations", std::to_string(*iterations_flag));

    InferenceConfig icfg;
    ExtractSettings ext;
    try {
        icfg = digest_inference(e.ini, e.seed);
        icfg.validate();
        ext = digest_extract(e.ini);
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& ex) {
        throw UsageError(std::string("reconstruct config: ") + ex.what());
    }

    if (!fs::exists(checkpoint_path)) throw UsageError("checkpoint not found: " + checkpoint_path);
    const TrainState state = load_checkpoint(checkpoint_path);
    if (state.net.growth().fading)
        throw std::runtime_error(
            "checkpoint stopped mid-growth; train to a stage boundary before reconstructing");

    const DatasetManifest manifest = load_manifest_checked(data_path);
    const auto entries = pick_split(manifest, split);
    const std::uint64_t config_hash = finalize_config(e, args.out);
    const auto comments = artifact_comments(config_hash, e.seed);

    std::vector<std::string> ids;
    std::vector<LatentFitResult> fits;
    int failures = 0;
    for (const ManifestEntry* entry : entries) {
        try {
            const ShapeSamples samples = load_entry_samples(*entry);
            InferenceConfig shape_cfg = icfg;
            shape_cfg.seed = derive_seed(e.seed, "fit", fnv1a64(entry->id));
            const LatentFitResult fit = estimate_latent(state.net, samples.samples, shape_cfg);
            const ScalarGrid grid =
                evaluate_grid(state.net, fit.z, bounds_from(ext.bound), ext.resolution, e.jobs);
            const TriangleMesh mesh = marching_cubes(grid, 0.0);
            if (mesh.empty())
                throw std::runtime_error("decoded field has no zero crossing in the grid");
            save_obj(mesh, args.out + "/" + entry->id + ".obj", comments);
            save_ply(mesh, args.out + "/" + entry->id + ".ply", comments);
            ids.push_back(entry->id);
            fits.push_back(fit);
            std::cout << entry->id << ": objective " << format_double(fit.objective) << ", "
                      << mesh.vertices.size() << " vertices / " << mesh.triangles.size()
                      << " triangles\n";
        } catch (const std::exception& ex) {
            ++failures;
            std::cerr << "shape " << entry->id << " failed: " << ex.what() << "\n";
        }
    }
    if (!ids.empty()) save_latents_ini(args.out + "/latents.ini", ids, fits, config_hash, e.seed);
    if (failures > 0) {
        std::cerr << failures << "/" << entries.size() << " shapes failed\n";
        return 1;
    }
    return 0;
}

int cmd_recover(const CommonArgs& args, const std::string& checkpoint_path,
                const std::string& data_path, const std::string& split,
                std::vector<double> ratios, int trials) {
    Effective e = begin_command(args);

    if (ratios.empty()) ratios = {0.05, 0.10, 0.15, 0.20, 0.25};
    for (double r : ratios) {
        if (!(r > 0.0 && r < 1.0))
            throw UsageError("removal ratios must lie strictly between 0 and 1");
        if (r > 0.25)
            std::cerr << "warning: removal ratio " << r
                      << " is outside the exercised range (0.05..0.25); proceeding\n";
    }
    if (trials < 1) throw UsageError("--trials must be at least 1");
    {
        IniSection& s = section(e.ini, "recover");
        std::string rs;
        for (double r : ratios) {
            if (!rs.empty()) rs += ' ';
            rs += format_double(r);
        }
        s.set("ratios", rs);
        s.set("trials", std::to_string(trials));
    }

    InferenceConfig icfg;
    ExtractSettings ext;
    EvalSettings ev;
    try {
        icfg = digest_inference(e.ini, e.seed);
        icfg.validate();
        ext = digest_extract(e.ini);
        ev = digest_eval(e.ini, e.seed);
        ev.proto.validate();
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& ex) {
        throw UsageError(std::string("recover config: ") + ex.what());
    }

    if (!fs::exists(checkpoint_path)) throw UsageError("checkpoint not found: " + checkpoint_path);
    const TrainState state = load_checkpoint(checkpoint_path);
    if (state.net.growth().fading)
        throw std::runtime_error(
            "checkpoint stopped mid-growth; train to a stage boundary before recovering");

    const DatasetManifest manifest = load_manifest_checked(data_path);
    const auto entries = pick_split(manifest, split);
    const std::string manifest_dir = fs::path(data_path).parent_path().string();
    const std::uint64_t config_hash = finalize_config(e, args.out);
    const auto comments = artifact_comments(config_hash, e.seed);

    std::ofstream report(args.out + "/recovery_report.csv", std::ios::trunc);
    if (!report) throw std::runtime_error("cannot open recovery report for writing");
    report << "# config " << hex64(config_hash) << " seed " << e.seed << "\n";
    report << "shape_id,trial,ratio,kept_points,cd_raw,cd_x1000,mesh_acc_raw,mesh_acc_x10,status\n";

    int failures = 0;
    for (const ManifestEntry* entry : entries) {
        TriangleMesh gt;
        try {
            gt = ground_truth_mesh(*entry, manifest_dir, ev.gt_resolution, e.jobs);
        } catch (const std::exception& ex) {
            ++failures;
            std::cerr << "shape " << entry->id << " ground truth failed: " << ex.what() << "\n";
            for (int t = 0; t < trials; ++t)
                for (double r : ratios)
                    report << entry->id << "," << t << "," << format_double(r)
                           << ",0,,,,,no ground truth\n";
            continue;
        }
        const ShapeSamples samples = load_entry_samples(*entry);

        for (int t = 0; t < trials; ++t)
            for (double ratio : ratios) {
                const std::string tag =
                    entry->id + "_t" + std::to_string(t) + "_r" +
                    std::to_string(int(std::lround(ratio * 100)));
                try {
                    const PartRemoval removal = remove_local_part(
                        samples, ratio, derive_seed(e.seed, "removal", std::uint64_t(t)));

                    InferenceConfig shape_cfg = icfg;
                    shape_cfg.seed = derive_seed(e.seed, "recover-fit", fnv1a64(entry->id),
                                                 std::uint64_t(t) * 1000 +
                                                     std::uint64_t(std::lround(ratio * 100)));
                    const LatentFitResult fit =
                        estimate_latent(state.net, removal.kept.samples, shape_cfg);
                    const ScalarGrid grid = evaluate_grid(state.net, fit.z,
                                                          bounds_from(ext.bound), ext.resolution,
                                                          e.jobs);
                    const TriangleMesh mesh = marching_cubes(grid, 0.0);
                    if (mesh.empty())
                        throw std::runtime_error("decoded field has no zero crossing in the grid");
                    save_obj(mesh, args.out + "/" + tag + ".obj", comments);

                    const std::uint64_t cd_seed =
                        derive_seed(e.seed, "recover-cd", fnv1a64(tag));
                    const auto pred_pts =
                        surface_sample(mesh, std::size_t(ev.proto.cd_points), cd_seed);
                    const auto gt_pts =
                        surface_sample(gt, std::size_t(ev.proto.cd_points), cd_seed);
                    const double cd = chamfer_distance(pred_pts, gt_pts, ev.proto.squared_cd);
                    const auto acc_pts = surface_sample(
                        mesh, std::size_t(ev.proto.accuracy_points),
                        derive_seed(e.seed, "recover-acc", fnv1a64(tag)));
                    const double acc = mesh_accuracy(acc_pts, gt);

                    report << entry->id << "," << t << "," << format_double(ratio) << ","
                           << removal.kept.size() << "," << format_double(cd) << ","
                           << format_double(cd * 1000.0) << "," << format_double(acc) << ","
                           << format_double(acc * 10.0) << ",ok\n";
                    std::cout << tag << ": kept " << removal.kept.size() << ", cd "
                              << format_double(cd) << "\n";
                } catch (const std::exception& ex) {
                    ++failures;
                    std::cerr << tag << " failed: " << ex.what() << "\n";
                    report << entry->id << "," << t << "," << format_double(ratio) << ",0,,,,,"
                           << "error\n";
                }
            }
    }
    report.flush();
    return failures > 0 ? 1 : 0;
}

int cmd_eval(const CommonArgs& args, const std::string& pred_dir, const std::string& data_path,
             const std::string& split, const std::string& report_path,
             std::optional<int> emd_points_flag) {
    Effective e = begin_command(args);
    if (emd_points_flag)
        section(e.ini, "eval").set("emd_points", std::to_string(*emd_points_flag));

    EvalSettings ev;
    try {
        ev = digest_eval(e.ini, e.seed);
        ev.proto.validate();
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& ex) {
        throw UsageError(std::string("eval config: ") + ex.what());
    }

    if (!fs::exists(pred_dir)) throw UsageError("prediction directory not found: " + pred_dir);
    const DatasetManifest manifest = load_manifest_checked(data_path);
    const auto entries = pick_split(manifest, split);
    const std::string manifest_dir = fs::path(data_path).parent_path().string();

    const std::string out_dir = fs::path(report_path).parent_path().string();
    const std::uint64_t config_hash = finalize_config(e, out_dir);

    std::vector<ShapeEval> rows;
    int failures = 0;
    for (const ManifestEntry* entry : entries) {
        ShapeEval row;
        row.shape_id = entry->id;
        const std::string pred_path = pred_dir + "/" + entry->id + ".obj";
        try {
            if (!fs::exists(pred_path))
                throw std::runtime_error("missing prediction " + pred_path);
            const TriangleMesh pred = load_obj(pred_path);
            const TriangleMesh gt =
                ground_truth_mesh(*entry, manifest_dir, ev.gt_resolution, e.jobs);
            row = evaluate_reconstruction(entry->id, pred, gt, ev.proto);
        } catch (const std::exception& ex) {
            row.error = ex.what();
        }
        if (!row.ok()) {
            ++failures;
            std::cerr << "shape " << entry->id << ": " << row.error << "\n";
        } else {
            std::cout << entry->id << ": cd " << format_double(row.cd_raw) << " emd "
                      << format_double(row.emd) << " acc " << format_double(row.mesh_acc) << "\n";
        }
        rows.push_back(std::move(row));
    }

    write_eval_report(report_path, rows,
                      "config " + hex64(config_hash) + " seed " + std::to_string(e.seed));
    std::cout << "report: " << report_path << " (config " << hex64(config_hash) << ")\n";
    return failures > 0 ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"neural signed-distance shape toolkit"};
    app.require_subcommand(1);

    CommonArgs sample_args, train_args, rec_args, recover_args, eval_args;
    std::string train_data, train_resume;
    Override<std::string> train_schedule;
    Override<int> train_epochs;
    std::string rec_checkpoint, rec_data, rec_split = "test";
    Override<int> rec_resolution, rec_iterations;
    std::string recover_checkpoint, recover_data, recover_split = "test";
    std::vector<double> recover_ratios;
    int recover_trials = 1;
    std::string eval_pred, eval_data, eval_split = "test", eval_report;
    Override<int> eval_emd_points;

    const auto add_common = [](CLI::App* sc, CommonArgs& a, bool out_required) {
        sc->add_option("--config", a.config_path, "run configuration file (ini)");
        auto* out = sc->add_option("--out", a.out, "output directory");
        if (out_required) out->required();
        a.seed.opt = sc->add_option("--seed", a.seed.value, "base seed (overrides the config)");
        a.jobs.opt = sc->add_option("--jobs", a.jobs.value, "worker threads for grid evaluation");
    };

    CLI::App* sc_sample =
        app.add_subcommand("sample-data", "generate SDF sample sets and a dataset manifest");
    add_common(sc_sample, sample_args, true);

    CLI::App* sc_train = app.add_subcommand("train", "fit the decoder and per-shape codes");
    add_common(sc_train, train_args, true);
    sc_train->add_option("--data", train_data, "dataset manifest")->required();
    sc_train->add_option("--resume", train_resume, "checkpoint to continue from");
    train_schedule.opt =
        sc_train->add_option("--schedule", train_schedule.value,
                             "curriculum | baseline | schedule file (overrides the config)");
    train_epochs.opt =
        sc_train->add_option("--epochs", train_epochs.value, "total epochs (overrides the config)");

    CLI::App* sc_rec =
        app.add_subcommand("reconstruct", "fit latent codes to samples and extract meshes");
    add_common(sc_rec, rec_args, true);
    sc_rec->add_option("--checkpoint", rec_checkpoint, "trained model")->required();
    sc_rec->add_option("--data", rec_data, "dataset manifest")->required();
    sc_rec->add_option("--split", rec_split, "train | test | all (default test)");
    rec_resolution.opt = sc_rec->add_option("--resolution", rec_resolution.value,
                                            "extraction grid samples per axis");
    rec_iterations.opt =
        sc_rec->add_option("--iterations", rec_iterations.value, "latent fit iterations");

    CLI::App* sc_recover =
        app.add_subcommand("recover", "refit codes from partial samples and extract meshes");
    add_common(sc_recover, recover_args, true);
    sc_recover->add_option("--checkpoint", recover_checkpoint, "trained model")->required();
    sc_recover->add_option("--data", recover_data, "dataset manifest")->required();
    sc_recover->add_option("--split", recover_split, "train | test | all (default test)");
    sc_recover->add_option("--ratios", recover_ratios, "removal ratios in (0,1)")
        ->delimiter(',');
    sc_recover->add_option("--trials", recover_trials, "independent removal draws per shape");

    CLI::App* sc_eval = app.add_subcommand("eval", "score reconstructed meshes against the data");
    add_common(sc_eval, eval_args, false);
    sc_eval->add_option("--pred", eval_pred, "directory with <shape_id>.obj predictions")
        ->required();
    sc_eval->add_option("--data", eval_data, "dataset manifest")->required();
    sc_eval->add_option("--split", eval_split, "train | test | all (default test)");
    sc_eval->add_option("--report", eval_report, "output CSV path")->required();
    eval_emd_points.opt =
        sc_eval->add_option("--emd-points", eval_emd_points.value, "EMD sample count override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sc_sample->parsed()) return cmd_sample_data(sample_args);
        if (sc_train->parsed())
            return cmd_train(train_args, train_data, train_resume, train_schedule.get(),
                             train_epochs.get());
        if (sc_rec->parsed())
            return cmd_reconstruct(rec_args, rec_checkpoint, rec_data, rec_split,
                                   rec_resolution.get(), rec_iterations.get());
        if (sc_recover->parsed())
            return cmd_recover(recover_args, recover_checkpoint, recover_data, recover_split,
                               recover_ratios, recover_trials);
        if (sc_eval->parsed())
            return cmd_eval(eval_args, eval_pred, eval_data, eval_split, eval_report,
                            eval_emd_points.get());
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 2;
}
