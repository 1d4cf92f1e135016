#include "gridsync/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "gridsync/error.hpp"
#include "gridsync/netmetrics.hpp"
#include "gridsync/random.hpp"
#include "gridsync/stats.hpp"
#include "gridsync/surrogate.hpp"

namespace gridsync::cli {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::uint64_t kSurrogateTag = 0x73757272;

/// Reads typed fields from one JSON object, collecting problems instead of throwing.
class Fields {
public:
    Fields(const nlohmann::json& obj, std::string prefix, std::vector<std::string>& problems)
        : obj_(obj), prefix_(std::move(prefix)), problems_(problems) {
        if (!obj_.is_object()) problems_.push_back(where("") + "expected an object");
    }

    bool has(const char* key) const { return obj_.is_object() && obj_.contains(key); }

    template <typename T>
    bool read(const char* key, T& dst) {
        seen_.push_back(key);
        if (!has(key)) return false;
        try {
            dst = obj_.at(key).get<T>();
            return true;
        } catch (const nlohmann::json::exception&) {
            problems_.push_back(where(key) + "has the wrong type");
            return false;
        }
    }

    template <typename T, typename Parse>
    void read_enum(const char* key, T& dst, Parse parse, const char* allowed) {
        std::string text;
        if (!read(key, text)) return;
        if (auto v = parse(text)) {
            dst = *v;
        } else {
            problems_.push_back(where(key) + "'" + text + "' is not one of " + allowed);
        }
    }

    const nlohmann::json* object(const char* key) {
        seen_.push_back(key);
        if (!has(key)) return nullptr;
        return &obj_.at(key);
    }

    void require(bool ok, const char* key, const std::string& what) {
        if (!ok) problems_.push_back(where(key) + what);
    }

    void reject_unknown() {
        if (!obj_.is_object()) return;
        for (const auto& [k, v] : obj_.items()) {
            if (std::find(seen_.begin(), seen_.end(), k) == seen_.end()) problems_.push_back(where(k.c_str()) + "unknown key");
        }
    }

    std::string where(const char* key) const {
        std::string path = prefix_;
        if (*key) path += (path.empty() ? "" : ".") + std::string(key);
        return path.empty() ? "" : path + ": ";
    }

private:
    const nlohmann::json& obj_;
    std::string prefix_;
    std::vector<std::string>& problems_;
    std::vector<std::string> seen_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

void apply_variable_defaults(RunConfig& cfg) {
    if (cfg.variable == "precip") {
        cfg.threshold = ThresholdSpec{95.0, Direction::above, Support::positive_only, 0.0};
        cfg.network_label = "EPE";
    } else if (cfg.variable == "tmax") {
        cfg.threshold = ThresholdSpec{95.0, Direction::above, Support::all, 0.0};
        cfg.network_label = "ETE";
    } else if (cfg.variable == "tmin") {
        cfg.threshold = ThresholdSpec{5.0, Direction::below, Support::all, 0.0};
        cfg.network_label = "ETE";
    }
}

// ---- stage plumbing -------------------------------------------------------

struct Paths {
    fs::path out;
    fs::path events() const { return out / "events.csv"; }
    fs::path grid() const { return out / "grid.csv"; }
    fs::path edges() const { return out / "edges.csv"; }
    fs::path metric(Metric m) const { return out / ("metric_" + std::string(to_string(m)) + ".csv"); }
    fs::path profile() const { return out / "profile.csv"; }
    fs::path surrogate() const { return out / "surrogate_stats.csv"; }
    fs::path corrected(Metric m, CorrectionMethod c) const {
        return out / ("corrected_" + std::string(to_string(m)) + "_" + std::string(to_string(c)) + ".csv");
    }
    fs::path report_json() const { return out / "report.json"; }
    fs::path report_txt() const { return out / "report.txt"; }
    fs::path manifest(std::string_view stage) const { return out / ("manifest_" + std::string(stage) + ".json"); }
};

json file_entry(const fs::path& p) { return json{{"name", p.filename().string()}, {"sha256", sha256_file(p)}}; }

void write_manifest(const Paths& paths, std::string_view stage, const RunConfig& cfg, json params,
                    const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs) {
    json m;
    m["stage"] = stage;
    m["version"] = kVersion;
    m["seed"] = cfg.seed;
    m["params"] = std::move(params);
    m["inputs"] = json::array();
    for (const auto& p : inputs) m["inputs"].push_back(file_entry(p));
    m["outputs"] = json::array();
    for (const auto& p : outputs) {
        m["outputs"].push_back(file_entry(p));
        for (const char* ext : {".json", ".legend.txt"}) {
            const fs::path side(p.string() + ext);
            if (fs::exists(side)) m["outputs"].push_back(file_entry(side));
        }
    }
    write_file(paths.manifest(stage), m.dump(2) + "\n");
}

json sync_json(const SyncParams& p) {
    return json{{"tau_max", p.tau_max},
                {"n_shuffles", p.n_shuffles},
                {"link_quantile", p.link_quantile},
                {"simultaneous_weight", p.simultaneous_weight},
                {"memoize", p.memoize}};
}

json threshold_json(const ThresholdSpec& t) {
    return json{{"percentile", t.percentile},
                {"direction", to_string(t.direction)},
                {"support", to_string(t.support)},
                {"wet_threshold", t.wet_threshold}};
}

json metric_names(const std::vector<Metric>& ms) {
    json a = json::array();
    for (auto m : ms) a.push_back(to_string(m));
    return a;
}

Network load_network(const Paths& paths) { return read_edge_list(paths.edges(), read_grid_nodes(paths.grid())); }

void stage_events(const RunConfig& cfg, const Paths& paths) {
    const auto gs = load_gridded(cfg.input_path, cfg.input_format);
    const auto seasonal = extract_season(gs, cfg.season);
    const auto set = detect_events(seasonal, cfg.threshold, cfg.dedup, cfg.threads);
    write_event_set(set, cfg.season, paths.events());
    write_grid_nodes(gs.grid, paths.grid());
    if (!set.unusable.empty()) {
        std::cerr << "[events] " << set.unusable.size() << " node(s) unusable (fewer than " << kMinSupportValues
                  << " support values)\n";
    }
    json params{{"variable", cfg.variable},
                {"season", to_string(cfg.season)},
                {"threshold", threshold_json(cfg.threshold)},
                {"dedup", cfg.dedup},
                {"T", seasonal.n_days()},
                {"n_nodes", gs.n_nodes()},
                {"unusable_nodes", set.unusable}};
    write_manifest(paths, "events", cfg, std::move(params), {cfg.input_path}, {paths.events(), paths.grid()});
}

void stage_network(const RunConfig& cfg, const Paths& paths) {
    const auto loaded = read_event_set(paths.events());
    const auto grid = read_grid_nodes(paths.grid());
    SyncParams params = cfg.sync;
    params.seed = cfg.seed;
    const Network net = build_network(loaded.set.series, grid, params, cfg.threads);
    write_edge_list(net, paths.edges());
    std::vector<std::size_t> counts;
    for (const auto& es : loaded.set.series) counts.push_back(es.size());
    json summary{{"sync", sync_json(params)},
                 {"T", loaded.set.season_days->size()},
                 {"event_counts", counts},
                 {"unusable_count", loaded.set.unusable.size()},
                 {"edge_count", net.edge_count()}};
    write_manifest(paths, "network", cfg, std::move(summary), {paths.events(), paths.grid()}, {paths.edges()});
}

void stage_metrics(const RunConfig& cfg, const Paths& paths) {
    const Network net = load_network(paths);
    std::vector<fs::path> outputs;
    for (auto m : cfg.metrics) {
        write_metric_field(compute_metric(m, net, cfg.threads), net.grid(), paths.metric(m));
        outputs.push_back(paths.metric(m));
    }
    write_manifest(paths, "metrics", cfg, json{{"metrics", metric_names(cfg.metrics)}}, {paths.edges(), paths.grid()},
                   outputs);
}

void stage_surrogate(const RunConfig& cfg, const Paths& paths) {
    const Network net = load_network(paths);
    const auto profile = estimate_profile(net, cfg.bin_width_km);
    const auto stats =
        ensemble_stats(profile, net.grid(), cfg.metrics, cfg.ensemble_size, derive_seed(cfg.seed, kSurrogateTag), cfg.threads);
    write_profile(profile, paths.profile());
    write_surrogate_stats(stats, paths.surrogate());
    json zero = json::object();
    for (const auto& s : stats) zero[std::string(to_string(s.metric))] = s.zero_mean_nodes.size();
    json params{{"ensemble_size", cfg.ensemble_size},
                {"bin_width_km", cfg.bin_width_km},
                {"metrics", metric_names(cfg.metrics)},
                {"zero_mean_node_counts", zero}};
    write_manifest(paths, "surrogate", cfg, std::move(params), {paths.edges(), paths.grid()},
                   {paths.profile(), paths.surrogate()});
}

void stage_correct(const RunConfig& cfg, const Paths& paths) {
    const auto stats = read_surrogate_stats(paths.surrogate());
    const auto grid = read_grid_nodes(paths.grid());
    std::vector<fs::path> inputs{paths.surrogate(), paths.grid()};
    std::vector<fs::path> outputs;
    json skipped = json::array();
    json undefined = json::object();
    for (auto m : cfg.metrics) {
        const auto it = std::find_if(stats.begin(), stats.end(), [m](const SurrogateStats& s) { return s.metric == m; });
        if (it == stats.end()) throw Error("surrogate statistics lack metric " + std::string(to_string(m)));
        auto raw = read_metric_field(paths.metric(m)).field;
        inputs.push_back(paths.metric(m));
        for (auto method : cfg.methods) {
            const auto target = paths.corrected(m, method);
            try {
                const auto cf = apply_correction(method, raw, *it);
                write_corrected_field(cf, grid, target);
                outputs.push_back(target);
                undefined[target.filename().string()] = cf.undefined_nodes.size();
            } catch (const DegenerateFieldError& e) {
                // Keep a stale file from an earlier run from being compared.
                fs::remove(target);
                std::cerr << "[correct] skipped " << to_string(m) << "/" << to_string(method) << ": " << e.what() << "\n";
                skipped.push_back(std::string(to_string(m)) + "/" + std::string(to_string(method)) + ": " + e.what());
            }
        }
    }
    json params{{"methods", json::array()}, {"undefined_counts", undefined}, {"skipped", skipped}};
    for (auto method : cfg.methods) params["methods"].push_back(to_string(method));
    write_manifest(paths, "correct", cfg, std::move(params), inputs, outputs);
}

void stage_compare(const RunConfig& cfg, const Paths& paths) {
    std::vector<CompareRun> runs = cfg.compare_runs;
    if (runs.empty()) runs.push_back({cfg.network_label, std::string(to_string(cfg.season)), cfg.output_dir});

    std::vector<ComparisonInput> inputs;
    std::vector<std::pair<std::string, std::string>> requested;
    std::vector<fs::path> input_files;
    for (const auto& run : runs) {
        requested.emplace_back(run.network, run.season);
        const Paths rp{run.dir};
        for (auto m : {Metric::DC, Metric::CC, Metric::MGD, Metric::BC}) {
            const auto sub_path = rp.corrected(m, CorrectionMethod::subtract);
            const auto div_path = rp.corrected(m, CorrectionMethod::divide);
            if (!fs::exists(sub_path) || !fs::exists(div_path)) continue;
            const auto sub = read_corrected_field(sub_path, CorrectionMethod::subtract, m);
            const auto div = read_corrected_field(div_path, CorrectionMethod::divide, m);
            try {
                inputs.push_back({{run.network, run.season, m}, paired_fields(sub, div, cfg.stats_on_normalized)});
            } catch (const InvalidArgument& e) {
                std::cerr << "[compare] " << run.network << "/" << run.season << "/" << to_string(m) << ": " << e.what()
                          << "\n";
                continue;
            }
            input_files.push_back(sub_path);
            input_files.push_back(div_path);
        }
    }
    const auto report = compare_methods(inputs, requested, cfg.alpha);
    write_file(paths.report_json(), report.to_json());
    write_file(paths.report_txt(), report.to_text());
    json params{{"alpha", cfg.alpha},
                {"statistics_on", cfg.stats_on_normalized ? "normalized" : "corrected"},
                {"missing", report.missing}};
    write_manifest(paths, "compare", cfg, std::move(params), input_files, {paths.report_json(), paths.report_txt()});
}

void stage_render(const RunConfig& cfg, const Paths& paths) {
    std::vector<fs::path> inputs;
    std::vector<fs::path> outputs;
    const auto grid = read_grid_nodes(paths.grid());
    for (auto m : cfg.metrics) {
        if (fs::exists(paths.metric(m))) {
            auto field = read_metric_field(paths.metric(m)).field;
            if (m == Metric::BC) field = log_bc(field);
            const auto target = paths.out / ("map_" + std::string(to_string(m)) + "_raw.ppm");
            render_map(field.values, field.defined, grid, target, cfg.palette);
            inputs.push_back(paths.metric(m));
            outputs.push_back(target);
        }
        for (auto method : cfg.methods) {
            const auto src = paths.corrected(m, method);
            if (!fs::exists(src)) continue;
            const auto cf = read_corrected_field(src, method, m);
            const auto target =
                paths.out / ("map_" + std::string(to_string(m)) + "_" + std::string(to_string(method)) + ".ppm");
            render_map(cf.normalized, cf.defined, grid, target, cfg.palette, std::pair{0.0, 1.0});
            inputs.push_back(src);
            outputs.push_back(target);
        }
    }
    write_manifest(paths, "render", cfg, json{{"palette", cfg.palette == Palette::viridis ? "viridis"
                                                          : cfg.palette == Palette::gray  ? "gray"
                                                                                          : "heat"}},
                   inputs, outputs);
}

void stage_synth(const RunConfig& cfg, const Paths& paths) {
    auto spec = cfg.synth->spec;
    spec.seed = cfg.seed;
    const auto gs = synth::gen_gridded_field(spec);
    write_gridded(gs, cfg.synth->output, cfg.synth->format);
    json params{{"rows", spec.layout.rows},         {"cols", spec.layout.cols},     {"spacing_km", spec.layout.spacing_km},
                {"lat0", spec.layout.lat0},         {"lon0", spec.layout.lon0},     {"first_year", spec.first_year},
                {"n_years", spec.n_years},          {"wet_prob", spec.wet_prob},    {"base_rate", spec.base_rate},
                {"rho", spec.rho},                  {"groups", spec.cluster_groups}};
    write_manifest(paths, "synth", cfg, std::move(params), {}, {cfg.synth->output});
}

using StageFn = void (*)(const RunConfig&, const Paths&);

const std::map<std::string_view, StageFn>& stages() {
    static const std::map<std::string_view, StageFn> table{
        {"events", stage_events},   {"network", stage_network}, {"metrics", stage_metrics},
        {"surrogate", stage_surrogate}, {"correct", stage_correct}, {"compare", stage_compare},
        {"render", stage_render},   {"synth", stage_synth}};
    return table;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error("invalid configuration:\n  " + [&] {
          std::string s;
          for (const auto& p : problems) s += (s.empty() ? "" : "\n  ") + p;
          return s;
      }()),
      problems_(std::move(problems)) {}

std::string sha256_file(const fs::path& path) {
    const std::string bytes = read_file(path);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed for " + path.string());
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += kHex[digest[k] >> 4];
        out += kHex[digest[k] & 0xf];
    }
    return out;
}

RunConfig parse_config(std::string_view json_text, const fs::path& base_dir, const Overrides& overrides) {
    std::vector<std::string> problems;
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }

    RunConfig cfg;
    Fields top(root, "", problems);

    top.read("variable", cfg.variable);
    if (cfg.variable != "precip" && cfg.variable != "tmax" && cfg.variable != "tmin") {
        problems.push_back("variable: '" + cfg.variable + "' is not one of precip, tmax, tmin");
    }
    apply_variable_defaults(cfg);
    top.read("network", cfg.network_label);
    top.read_enum("season", cfg.season, parse_season, "JJA, DJF");

    if (const auto* in = top.object("input")) {
        Fields f(*in, "input", problems);
        std::string path;
        if (f.read("path", path)) cfg.input_path = resolve(base_dir, path);
        f.read_enum("format", cfg.input_format, parse_grid_format, "binary, csv");
        f.reject_unknown();
    }

    std::uint64_t seed = 0;
    const bool has_seed = top.read("seed", seed);
    if (overrides.seed) {
        cfg.seed = *overrides.seed;
    } else if (has_seed) {
        cfg.seed = seed;
    } else {
        problems.push_back("seed: required (pass it in the config or with --seed)");
    }

    std::string out;
    if (top.read("output_dir", out)) cfg.output_dir = resolve(base_dir, out);
    else cfg.output_dir = base_dir / "out";
    if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;

    top.read("threads", cfg.threads);
    if (overrides.threads) cfg.threads = *overrides.threads;

    if (const auto* t = top.object("threshold")) {
        Fields f(*t, "threshold", problems);
        f.read("percentile", cfg.threshold.percentile);
        f.read_enum("direction", cfg.threshold.direction, parse_direction, "above, below");
        f.read_enum("support", cfg.threshold.support, parse_support, "positive_only, all");
        f.read("wet_threshold", cfg.threshold.wet_threshold);
        f.read("dedup", cfg.dedup);
        f.require(cfg.threshold.percentile > 0 && cfg.threshold.percentile < 100, "percentile", "must lie in (0, 100)");
        f.reject_unknown();
    }

    if (const auto* s = top.object("sync")) {
        Fields f(*s, "sync", problems);
        f.read("tau_max", cfg.sync.tau_max);
        f.read("n_shuffles", cfg.sync.n_shuffles);
        f.read("link_quantile", cfg.sync.link_quantile);
        f.read("simultaneous_weight", cfg.sync.simultaneous_weight);
        f.read("memoize", cfg.sync.memoize);
        f.require(cfg.sync.tau_max >= 0, "tau_max", "must be >= 0");
        f.require(cfg.sync.n_shuffles >= 100, "n_shuffles", "must be >= 100");
        f.require(cfg.sync.link_quantile > 0 && cfg.sync.link_quantile < 1, "link_quantile", "must lie in (0, 1)");
        f.require(cfg.sync.simultaneous_weight > 0, "simultaneous_weight", "must be positive");
        f.reject_unknown();
    }

    if (const auto* s = top.object("surrogate")) {
        Fields f(*s, "surrogate", problems);
        f.read("ensemble_size", cfg.ensemble_size);
        f.read("bin_width_km", cfg.bin_width_km);
        f.require(cfg.ensemble_size >= 1, "ensemble_size", "must be >= 1");
        f.require(cfg.bin_width_km > 0, "bin_width_km", "must be positive");
        f.reject_unknown();
    }

    std::vector<std::string> metric_names_in;
    if (top.read("metrics", metric_names_in)) {
        cfg.metrics.clear();
        for (const auto& name : metric_names_in) {
            if (auto m = parse_metric(name)) cfg.metrics.push_back(*m);
            else problems.push_back("metrics: '" + name + "' is not one of DC, CC, MGD, BC");
        }
    }

    if (const auto* c = top.object("correction")) {
        Fields f(*c, "correction", problems);
        std::vector<std::string> names;
        if (f.read("methods", names)) {
            cfg.methods.clear();
            for (const auto& name : names) {
                if (auto m = parse_correction_method(name)) cfg.methods.push_back(*m);
                else problems.push_back("correction.methods: '" + name + "' is not one of subtract, divide");
            }
        }
        std::string on = "normalized";
        f.read("statistics_on", on);
        f.require(on == "normalized" || on == "corrected", "statistics_on", "must be normalized or corrected");
        cfg.stats_on_normalized = on == "normalized";
        f.reject_unknown();
    }

    if (const auto* s = top.object("stats")) {
        Fields f(*s, "stats", problems);
        f.read("alpha", cfg.alpha);
        f.require(cfg.alpha > 0 && cfg.alpha < 1, "alpha", "must lie in (0, 1)");
        f.reject_unknown();
    }

    if (const auto* r = top.object("render")) {
        Fields f(*r, "render", problems);
        f.read_enum("palette", cfg.palette, parse_palette, "viridis, gray, heat");
        f.reject_unknown();
    }

    if (const auto* c = top.object("compare")) {
        Fields f(*c, "compare", problems);
        if (const auto* runs = f.object("runs")) {
            if (!runs->is_array()) problems.push_back("compare.runs: expected an array");
            else {
                for (std::size_t k = 0; k < runs->size(); ++k) {
                    Fields rf((*runs)[k], "compare.runs[" + std::to_string(k) + "]", problems);
                    CompareRun run;
                    std::string dir;
                    rf.read("network", run.network);
                    rf.read("season", run.season);
                    rf.require(rf.read("dir", dir), "dir", "required");
                    rf.require(run.season == "JJA" || run.season == "DJF", "season", "must be JJA or DJF");
                    rf.require(!run.network.empty(), "network", "required");
                    run.dir = resolve(base_dir, dir);
                    rf.reject_unknown();
                    cfg.compare_runs.push_back(std::move(run));
                }
            }
        }
        f.reject_unknown();
    }

    if (const auto* s = top.object("synth")) {
        Fields f(*s, "synth", problems);
        SynthConfig sc;
        std::string output;
        f.require(f.read("output", output), "output", "required");
        sc.output = resolve(base_dir, output);
        f.read_enum("format", sc.format, parse_grid_format, "binary, csv");
        auto& spec = sc.spec;
        f.read("rows", spec.layout.rows);
        f.read("cols", spec.layout.cols);
        f.read("spacing_km", spec.layout.spacing_km);
        f.read("lat0", spec.layout.lat0);
        f.read("lon0", spec.layout.lon0);
        f.read("first_year", spec.first_year);
        f.read("n_years", spec.n_years);
        f.read("wet_prob", spec.wet_prob);
        f.read("base_rate", spec.base_rate);
        f.read("rho", spec.rho);
        f.read("groups", spec.cluster_groups);
        f.require(spec.layout.rows * spec.layout.cols >= 3, "rows", "lattice needs at least 3 nodes");
        f.require(spec.n_years >= 1, "n_years", "must be >= 1");
        for (const char* key : {"wet_prob", "base_rate", "rho"}) {
            const double v = std::string_view(key) == "wet_prob" ? spec.wet_prob
                             : std::string_view(key) == "base_rate" ? spec.base_rate
                                                                    : spec.rho;
            f.require(v >= 0 && v <= 1, key, "must lie in [0, 1]");
        }
        for (const auto& g : spec.cluster_groups) {
            for (auto node : g) {
                f.require(node < spec.layout.rows * spec.layout.cols, "groups",
                          "node " + std::to_string(node) + " is outside the lattice");
            }
        }
        f.reject_unknown();
        cfg.synth = std::move(sc);
    }

    top.reject_unknown();
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return cfg;
}

RunConfig load_config(const fs::path& path, const Overrides& overrides) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw ConfigError({e.what()});
    }
    return parse_config(text, path.parent_path(), overrides);
}

void validate_for(std::string_view command, const RunConfig& cfg) {
    std::vector<std::string> problems;
    if (std::find(std::begin(kCommands), std::end(kCommands), command) == std::end(kCommands)) {
        problems.push_back("unknown command '" + std::string(command) + "'");
    }
    const bool needs_input = command == "events" || command == "pipeline";
    if (needs_input) {
        if (cfg.input_path.empty()) problems.push_back("input.path: required");
        else if (!fs::exists(cfg.input_path)) problems.push_back("input.path: " + cfg.input_path.string() + " does not exist");
    }
    if (command == "synth" && !cfg.synth) problems.push_back("synth: section required for the synth command");
    const Paths paths{cfg.output_dir};
    auto need = [&](const fs::path& p, const char* stage) {
        if (!fs::exists(p)) problems.push_back(p.string() + " missing; run the " + std::string(stage) + " stage first");
    };
    if (command == "network") {
        need(paths.events(), "events");
        need(paths.grid(), "events");
    }
    if (command == "metrics" || command == "surrogate") need(paths.edges(), "network");
    if (command == "correct") {
        need(paths.surrogate(), "surrogate");
        for (auto m : cfg.metrics) need(paths.metric(m), "metrics");
    }
    if (command == "render") need(paths.grid(), "events");
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

void run_stage(std::string_view command, const RunConfig& cfg) {
    validate_for(command, cfg);
    const Paths paths{cfg.output_dir};
    auto timed = [&](std::string_view name) {
        const auto start = std::chrono::steady_clock::now();
        std::cerr << "[" << name << "] running\n";
        stages().at(name)(cfg, paths);
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        std::fprintf(stderr, "[%.*s] done in %.2f s\n", static_cast<int>(name.size()), name.data(), took.count());
    };
    if (command == "pipeline") {
        for (std::string_view s : {"events", "network", "metrics", "surrogate", "correct", "compare", "render"}) timed(s);
    } else {
        timed(command);
    }
}

int run_command(std::string_view command, const RunConfig& cfg) {
    try {
        run_stage(command, cfg);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace gridsync::cli
