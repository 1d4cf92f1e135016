#include "gridsync/surrogate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "gridsync/error.hpp"
#include "gridsync/grid_io.hpp"
#include "gridsync/netmetrics.hpp"
#include "gridsync/parallel.hpp"
#include "gridsync/random.hpp"

#include <json.hpp>

namespace gridsync {
namespace {

constexpr std::size_t kMemberBlock = 8;
constexpr std::uint64_t kMemberTag = 0x7375727267617465ULL;

template <typename T>
T parse_field(std::string_view s, const std::filesystem::path& path, std::size_t line) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError(path.string() + ":" + std::to_string(line) + ": cannot parse '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path, std::string_view header,
                                                std::size_t width) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw FormatError(path.string() + ":1: expected header '" + std::string(header) + "'");
    }
    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        if (fields.size() != width) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                              " fields");
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace

std::size_t DistanceProfile::bin_of(double distance_km) const {
    return static_cast<std::size_t>(std::floor(distance_km / bin_width_km));
}

double DistanceProfile::probability(double distance_km) const {
    const std::size_t b = bin_of(distance_km);
    return b < prob.size() ? prob[b] : 0.0;
}

DistanceProfile estimate_profile(const Network& net, double bin_width_km) {
    if (!(bin_width_km > 0.0)) throw InvalidArgument("bin width must be positive");
    const auto& grid = net.grid();
    const std::size_t n = grid.size();
    DistanceProfile p;
    p.bin_width_km = bin_width_km;

    double max_d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) max_d = std::max(max_d, haversine_km(grid[i], grid[j]));
    }
    const std::size_t bins = static_cast<std::size_t>(std::floor(max_d / bin_width_km)) + 1;
    p.pair_count.assign(bins, 0);
    p.link_count.assign(bins, 0);
    p.prob.assign(bins, 0.0);
    p.bin_edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) p.bin_edges[b] = static_cast<double>(b) * bin_width_km;

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) ++p.pair_count[p.bin_of(haversine_km(grid[i], grid[j]))];
    }
    for (const auto& [i, j] : net.edges()) ++p.link_count[p.bin_of(haversine_km(grid[i], grid[j]))];
    for (std::size_t b = 0; b < bins; ++b) {
        if (p.pair_count[b] > 0) {
            p.prob[b] = static_cast<double>(p.link_count[b]) / static_cast<double>(p.pair_count[b]);
        }
    }
    return p;
}

std::vector<double> pair_probabilities(const DistanceProfile& profile, const GridSpec& grid) {
    const std::size_t n = grid.size();
    std::vector<double> out;
    out.reserve(n * (n > 0 ? n - 1 : 0) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) out.push_back(profile.probability(haversine_km(grid[i], grid[j])));
    }
    return out;
}

std::uint64_t member_stream_seed(std::uint64_t seed, std::size_t member) {
    return derive_seed(seed ^ kMemberTag, member);
}

Network sample_surrogate(std::span<const double> pair_prob, const GridSpec& grid, std::uint64_t member_seed) {
    const std::size_t n = grid.size();
    if (pair_prob.size() != n * (n > 0 ? n - 1 : 0) / 2) throw InvalidArgument("pair probability table size mismatch");
    Rng rng(member_seed);
    std::vector<Edge> edges;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++k) {
            const double p = pair_prob[k];
            // One draw per pair regardless of p keeps streams aligned across profiles.
            const double u = rng.uniform();
            if (u < p) edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
    }
    return Network(grid, edges);
}

Network sample_surrogate(const DistanceProfile& profile, const GridSpec& grid, std::uint64_t member_seed) {
    return sample_surrogate(pair_probabilities(profile, grid), grid, member_seed);
}

std::vector<SurrogateStats> ensemble_stats(const DistanceProfile& profile, const GridSpec& grid,
                                           std::span<const Metric> metrics, std::size_t ensemble_size,
                                           std::uint64_t seed, unsigned threads) {
    if (ensemble_size < 1) throw InvalidArgument("ensemble size must be >= 1");
    const std::size_t n = grid.size();
    const auto table = pair_probabilities(profile, grid);
    const std::size_t n_metrics = metrics.size();
    const std::size_t n_blocks = (ensemble_size + kMemberBlock - 1) / kMemberBlock;

    // partial[block][metric][node]
    std::vector<std::vector<std::vector<double>>> partial(n_blocks);
    parallel_for(n_blocks, threads, [&](std::size_t block) {
        std::vector<std::vector<CompensatedSum>> sums(n_metrics, std::vector<CompensatedSum>(n));
        const std::size_t first = block * kMemberBlock;
        const std::size_t last = std::min(ensemble_size, first + kMemberBlock);
        for (std::size_t m = first; m < last; ++m) {
            const Network net = sample_surrogate(table, grid, member_stream_seed(seed, m));
            for (std::size_t k = 0; k < n_metrics; ++k) {
                // Nested parallelism would oversubscribe; members are the parallel axis.
                const MetricField f = compute_metric(metrics[k], net, 1);
                for (std::size_t i = 0; i < n; ++i) sums[k][i].add(f.values[i]);
            }
        }
        auto& out = partial[block];
        out.assign(n_metrics, std::vector<double>(n));
        for (std::size_t k = 0; k < n_metrics; ++k) {
            for (std::size_t i = 0; i < n; ++i) out[k][i] = sums[k][i].value();
        }
    });

    std::vector<SurrogateStats> result(n_metrics);
    for (std::size_t k = 0; k < n_metrics; ++k) {
        auto& s = result[k];
        s.metric = metrics[k];
        s.ensemble_size = ensemble_size;
        s.mean.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            CompensatedSum total;
            for (const auto& p : partial) total.add(p[k][i]);
            s.mean[i] = total.value() / static_cast<double>(ensemble_size);
            if (s.mean[i] == 0.0) s.zero_mean_nodes.push_back(i);
        }
    }
    return result;
}

void write_profile(const DistanceProfile& profile, const std::filesystem::path& path) {
    std::string out = "bin_lo_km,bin_hi_km,pairs,links,prob\n";
    for (std::size_t b = 0; b < profile.bins(); ++b) {
        out += format_number(profile.bin_edges[b]) + "," + format_number(profile.bin_edges[b + 1]) + "," +
               std::to_string(profile.pair_count[b]) + "," + std::to_string(profile.link_count[b]) + "," +
               format_number(profile.prob[b]) + "\n";
    }
    write_file(path, out);
}

DistanceProfile read_profile(const std::filesystem::path& path) {
    const auto rows = read_rows(path, "bin_lo_km,bin_hi_km,pairs,links,prob", 5);
    if (rows.empty()) throw FormatError(path.string() + ": profile has no bins");
    DistanceProfile p;
    std::size_t line = 2;
    for (const auto& r : rows) {
        const auto lo = parse_field<double>(r[0], path, line);
        const auto hi = parse_field<double>(r[1], path, line);
        if (p.bin_edges.empty()) {
            p.bin_edges.push_back(lo);
            p.bin_width_km = hi - lo;
        }
        p.bin_edges.push_back(hi);
        p.pair_count.push_back(parse_field<std::uint64_t>(r[2], path, line));
        p.link_count.push_back(parse_field<std::uint64_t>(r[3], path, line));
        p.prob.push_back(parse_field<double>(r[4], path, line));
        ++line;
    }
    return p;
}

void write_surrogate_stats(std::span<const SurrogateStats> stats, const std::filesystem::path& path) {
    std::string out = "node_id,metric,mean,zero_flag\n";
    for (const auto& s : stats) {
        for (std::size_t i = 0; i < s.mean.size(); ++i) {
            out += std::to_string(i) + "," + std::string(to_string(s.metric)) + "," + format_number(s.mean[i]) + "," +
                   (s.mean[i] == 0.0 ? "1" : "0") + "\n";
        }
    }
    write_file(path, out);
    nlohmann::json meta{{"ensemble_size", stats.empty() ? 0 : stats.front().ensemble_size}};
    write_file(std::filesystem::path(path.string() + ".json"), meta.dump(2) + "\n");
}

std::vector<SurrogateStats> read_surrogate_stats(const std::filesystem::path& path) {
    const auto rows = read_rows(path, "node_id,metric,mean,zero_flag", 4);
    std::vector<SurrogateStats> out;
    std::map<Metric, std::size_t> slot;
    std::size_t line = 2;
    for (const auto& r : rows) {
        const auto metric = parse_metric(r[1]);
        if (!metric) throw FormatError(path.string() + ":" + std::to_string(line) + ": unknown metric " + r[1]);
        auto [it, fresh] = slot.emplace(*metric, out.size());
        if (fresh) out.push_back(SurrogateStats{*metric, {}, 0, {}});
        auto& s = out[it->second];
        const auto node = parse_field<std::size_t>(r[0], path, line);
        if (node != s.mean.size()) throw FormatError(path.string() + ":" + std::to_string(line) + ": node ids out of order");
        s.mean.push_back(parse_field<double>(r[2], path, line));
        if (r[3] == "1") s.zero_mean_nodes.push_back(node);
        ++line;
    }
    const std::filesystem::path meta_path(path.string() + ".json");
    if (std::filesystem::exists(meta_path)) {
        try {
            const auto size = nlohmann::json::parse(read_file(meta_path)).at("ensemble_size").get<std::size_t>();
            for (auto& s : out) s.ensemble_size = size;
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(meta_path.string() + ": " + e.what());
        }
    }
    return out;
}

}  // namespace gridsync
