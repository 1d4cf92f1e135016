#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gridsync/grid.hpp"
#include "gridsync/metric_field.hpp"
#include "gridsync/network.hpp"

namespace gridsync {

/// Empirical link probability as a function of great-circle distance.
struct DistanceProfile {
    double bin_width_km = 50.0;
    std::vector<double> bin_edges;  // size bins + 1, bin_edges[0] = 0
    std::vector<std::uint64_t> pair_count;
    std::vector<std::uint64_t> link_count;
    std::vector<double> prob;

    std::size_t bins() const noexcept { return prob.size(); }
    std::size_t bin_of(double distance_km) const;
    /// Link probability at a distance; 0 beyond the last bin.
    double probability(double distance_km) const;
};

/// Bins every unordered node pair by haversine distance; empty bins get p = 0.
DistanceProfile estimate_profile(const Network& net, double bin_width_km = 50.0);

/// Per-pair link probabilities in the order (0,1), (0,2), ..., (n-2,n-1).
std::vector<double> pair_probabilities(const DistanceProfile& profile, const GridSpec& grid);

/// One surrogate: an independent Bernoulli draw per unordered pair.
Network sample_surrogate(const DistanceProfile& profile, const GridSpec& grid, std::uint64_t member_seed);
Network sample_surrogate(std::span<const double> pair_prob, const GridSpec& grid, std::uint64_t member_seed);

std::uint64_t member_stream_seed(std::uint64_t seed, std::size_t member);

struct SurrogateStats {
    Metric metric = Metric::DC;
    std::vector<double> mean;
    std::size_t ensemble_size = 0;
    std::vector<std::size_t> zero_mean_nodes;
};

/**
 * Per-node ensemble mean of each requested metric over `ensemble_size`
 * surrogates. Member m uses member_stream_seed(seed, m). Members are
 * reduced in fixed blocks with compensated sums, so the means do not
 * depend on the thread count.
 */
std::vector<SurrogateStats> ensemble_stats(const DistanceProfile& profile, const GridSpec& grid,
                                           std::span<const Metric> metrics, std::size_t ensemble_size,
                                           std::uint64_t seed, unsigned threads = 0);

/// `bin_lo_km,bin_hi_km,pairs,links,prob`
void write_profile(const DistanceProfile& profile, const std::filesystem::path& path);
DistanceProfile read_profile(const std::filesystem::path& path);

/// `node_id,metric,mean,zero_flag`, one block of rows per metric.
void write_surrogate_stats(std::span<const SurrogateStats> stats, const std::filesystem::path& path);
std::vector<SurrogateStats> read_surrogate_stats(const std::filesystem::path& path);

}  // namespace gridsync
