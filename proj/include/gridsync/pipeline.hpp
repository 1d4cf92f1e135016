#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridsync/calendar.hpp"
#include "gridsync/correction.hpp"
#include "gridsync/error.hpp"
#include "gridsync/events.hpp"
#include "gridsync/grid_io.hpp"
#include "gridsync/metric_field.hpp"
#include "gridsync/render.hpp"
#include "gridsync/sync.hpp"
#include "gridsync/synth.hpp"

namespace gridsync::cli {

inline constexpr std::string_view kVersion = "0.1.0";

/// Invalid configuration; the message lists every problem found, one per line.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct CompareRun {
    std::string network;
    std::string season;
    std::filesystem::path dir;
};

struct SynthConfig {
    synth::GriddedSpec spec;
    std::filesystem::path output;
    GridFormat format = GridFormat::binary;
};

struct RunConfig {
    std::filesystem::path input_path;
    GridFormat input_format = GridFormat::binary;
    std::string variable = "precip";  // precip, tmax, tmin
    std::string network_label = "EPE";
    Season season = Season::JJA;
    ThresholdSpec threshold;
    bool dedup = true;
    SyncParams sync;
    std::size_t ensemble_size = 1000;
    double bin_width_km = 50.0;
    std::vector<Metric> metrics{Metric::DC, Metric::CC, Metric::MGD, Metric::BC};
    std::vector<CorrectionMethod> methods{CorrectionMethod::subtract, CorrectionMethod::divide};
    bool stats_on_normalized = true;
    double alpha = 0.05;
    Palette palette = Palette::viridis;
    std::vector<CompareRun> compare_runs;  // empty: this run only
    std::optional<SynthConfig> synth;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::filesystem::path> output_dir;
};

/// Parses a JSON config; relative paths resolve against the config's
/// directory. Unknown keys and bad values are all collected into one ConfigError.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir, const Overrides& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

/// Checks that the files a command needs exist; throws ConfigError.
void validate_for(std::string_view command, const RunConfig& cfg);

inline constexpr std::string_view kCommands[] = {"events",  "network", "metrics", "surrogate", "correct",
                                                 "compare", "synth",   "pipeline", "render"};

/// Runs one stage (or the whole chain for "pipeline"). Throws on failure;
/// see run_command for exit-code mapping.
void run_stage(std::string_view command, const RunConfig& cfg);

/// 0 success, 1 validation error, 2 runtime failure. Errors go to stderr.
int run_command(std::string_view command, const RunConfig& cfg);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace gridsync::cli
