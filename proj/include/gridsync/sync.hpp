#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gridsync/events.hpp"
#include "gridsync/grid.hpp"
#include "gridsync/network.hpp"

namespace gridsync {

struct SyncParams {
    int tau_max = 0;               // days
    int n_shuffles = 1000;         // >= 100
    double link_quantile = 0.995;  // in (0, 1)
    std::uint64_t seed = 0;
    /// Weight of a zero-lag coincidence; 0.5 gives the Quiroga convention.
    double simultaneous_weight = 1.0;
    /// With tau_max = 0, share null thresholds between pairs with equal
    /// (T, N_i, N_j). Switch off for A/B checks.
    bool memoize = true;

    /// Throws InvalidArgument describing the first violated constraint.
    void validate() const;
};

struct SyncResult {
    double es = 0.0;
    double threshold = 0.0;
    bool significant = false;
};

/**
 * Dynamic local time scale for the event pair (m, n), 0-based:
 * half the smallest inter-event gap before or after event m of `ei` and
 * event n of `ej`. Gaps that do not exist (first/last events) are skipped;
 * +inf when neither series has a second event.
 */
double local_tau(std::span<const std::int32_t> ei, std::span<const std::int32_t> ej, std::size_t m,
                 std::size_t n);

/// Number of event pairs with |lag| <= tau_max and |lag| < local_tau.
std::int64_t event_sync(std::span<const std::int32_t> ei, std::span<const std::int32_t> ej, int tau_max);

/// As event_sync, but zero-lag pairs contribute `simultaneous_weight`.
double event_sync_weighted(std::span<const std::int32_t> ei, std::span<const std::int32_t> ej, int tau_max,
                           double simultaneous_weight);

/**
 * Monte-Carlo significance threshold for a pair with `n_i` and `n_j` events
 * over the day universe `season_days`. Each shuffle draws both event sets
 * uniformly without replacement; the result is the nearest-rank
 * link_quantile order statistic of the null sample. Zero events give 0.
 */
double null_threshold_counts(std::span<const std::int32_t> season_days, std::size_t n_i, std::size_t n_j,
                             const SyncParams& params, std::uint64_t stream_seed);

double null_threshold(const EventSeries& ei, const EventSeries& ej, const SyncParams& params,
                      std::uint64_t pair_seed);

/// Smallest k with hypergeometric CDF(k; T, n_i, n_j) >= q.
std::int64_t null_threshold_exact(std::size_t T, std::size_t n_i, std::size_t n_j, double q);

/// RNG stream for a node pair; symmetric in (i, j).
std::uint64_t pair_stream_seed(std::uint64_t seed, std::size_t i, std::size_t j);

/// RNG stream for the memoized null of an event-count pair; symmetric in counts.
std::uint64_t count_stream_seed(std::uint64_t seed, std::size_t T, std::size_t n_i, std::size_t n_j);

/// Memoized threshold for (T, n_i, n_j) under the count seed policy.
double memoized_null_threshold(std::span<const std::int32_t> season_days, std::size_t n_i, std::size_t n_j,
                               const SyncParams& params);

/// ES, threshold and decision for one pair; uses the memoized policy when
/// params.memoize and tau_max == 0, else the pair stream (i, j).
SyncResult test_pair(const EventSeries& ei, const EventSeries& ej, const SyncParams& params);

/**
 * Links every pair whose synchronization reaches its null threshold
 * (ES >= threshold, with at least one synchronized event). Series must
 * share one season universe and appear in node order. The edge set is a
 * pure function of params.seed.
 */
Network build_network(std::span<const EventSeries> series, const GridSpec& grid, const SyncParams& params,
                      unsigned threads = 0);

}  // namespace gridsync
