#include "gridsync/sync.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "gridsync/error.hpp"
#include "gridsync/parallel.hpp"
#include "gridsync/random.hpp"

namespace gridsync {
namespace {

constexpr std::uint64_t kCountStreamTag = 0x6e756c6c2d6d656dULL;

bool uses_memo(const SyncParams& p) { return p.memoize && p.tau_max == 0; }

/// Partial Fisher-Yates over a persistent permutation: the first k entries
/// are a uniform k-subset whatever the current arrangement.
void draw_subset(std::vector<std::uint32_t>& perm, std::size_t k, Rng& rng) {
    const std::size_t T = perm.size();
    for (std::size_t a = 0; a < k; ++a) {
        const std::size_t b = a + static_cast<std::size_t>(rng.below(T - a));
        std::swap(perm[a], perm[b]);
    }
}

}  // namespace

void SyncParams::validate() const {
    if (tau_max < 0) throw InvalidArgument("tau_max must be >= 0");
    if (n_shuffles < 100) throw InvalidArgument("n_shuffles must be >= 100");
    if (!(link_quantile > 0.0 && link_quantile < 1.0)) throw InvalidArgument("link_quantile must lie in (0, 1)");
    if (!(simultaneous_weight > 0.0)) throw InvalidArgument("simultaneous_weight must be positive");
}

double local_tau(std::span<const std::int32_t> ei, std::span<const std::int32_t> ej, std::size_t m,
                 std::size_t n) {
    if (m >= ei.size() || n >= ej.size()) throw InvalidArgument("local_tau: event index out of range");
    double gap = std::numeric_limits<double>::infinity();
    auto consider = [&gap](std::int32_t a, std::int32_t b) { gap = std::min(gap, static_cast<double>(std::abs(b - a))); };
    if (m > 0) consider(ei[m - 1], ei[m]);
    if (m + 1 < ei.size()) consider(ei[m], ei[m + 1]);
    if (n > 0) consider(ej[n - 1], ej[n]);
    if (n + 1 < ej.size()) consider(ej[n], ej[n + 1]);
    return 0.5 * gap;
}

double event_sync_weighted(std::span<const std::int32_t> ei, std::span<const std::int32_t> ej, int tau_max,
                           double simultaneous_weight) {
    double es = 0.0;
    auto lo = ej.begin();
    for (std::size_t m = 0; m < ei.size(); ++m) {
        const std::int64_t t = ei[m];
        while (lo != ej.end() && *lo < t - tau_max) ++lo;
        for (auto it = lo; it != ej.end() && *it <= t + tau_max; ++it) {
            const std::int64_t lag = *it - t;
            const auto n = static_cast<std::size_t>(it - ej.begin());
            if (static_cast<double>(std::abs(lag)) < local_tau(ei, ej, m, n)) {
                es += lag == 0 ? simultaneous_weight : 1.0;
            }
        }
    }
    return es;
}

std::int64_t event_sync(std::span<const std::int32_t> ei, std::span<const std::int32_t> ej, int tau_max) {
    return static_cast<std::int64_t>(event_sync_weighted(ei, ej, tau_max, 1.0));
}

double null_threshold_counts(std::span<const std::int32_t> season_days, std::size_t n_i, std::size_t n_j,
                             const SyncParams& params, std::uint64_t stream_seed) {
    params.validate();
    const std::size_t T = season_days.size();
    if (n_i > T || n_j > T) throw InvalidArgument("event count exceeds the season length");
    if (n_i == 0 || n_j == 0) return 0.0;

    Rng rng(stream_seed);
    std::vector<std::uint32_t> perm(T);
    for (std::size_t k = 0; k < T; ++k) perm[k] = static_cast<std::uint32_t>(k);
    std::vector<double> sample(static_cast<std::size_t>(params.n_shuffles));

    const bool overlap_only = params.tau_max == 0 && params.simultaneous_weight == 1.0;
    std::vector<std::uint8_t> mark(overlap_only ? T : 0, 0);
    std::vector<std::int32_t> a, b;

    for (auto& value : sample) {
        if (overlap_only) {
            // With no lag allowed and every gap >= 1, ES is the set overlap.
            draw_subset(perm, n_i, rng);
            for (std::size_t k = 0; k < n_i; ++k) mark[perm[k]] = 1;
            draw_subset(perm, n_j, rng);
            std::size_t overlap = 0;
            for (std::size_t k = 0; k < n_j; ++k) overlap += mark[perm[k]];
            std::fill(mark.begin(), mark.end(), 0);
            value = static_cast<double>(overlap);
            continue;
        }
        draw_subset(perm, n_i, rng);
        a.clear();
        for (std::size_t k = 0; k < n_i; ++k) a.push_back(season_days[perm[k]]);
        draw_subset(perm, n_j, rng);
        b.clear();
        for (std::size_t k = 0; k < n_j; ++k) b.push_back(season_days[perm[k]]);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        value = event_sync_weighted(a, b, params.tau_max, params.simultaneous_weight);
    }
    std::sort(sample.begin(), sample.end());
    const auto n = static_cast<double>(sample.size());
    auto rank = static_cast<std::size_t>(std::ceil(params.link_quantile * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sample.size());
    return sample[rank - 1];
}

double null_threshold(const EventSeries& ei, const EventSeries& ej, const SyncParams& params,
                      std::uint64_t pair_seed) {
    if (!ei.season_days || !ej.season_days || ei.season_days->size() != ej.season_days->size()) {
        throw InvalidArgument("event series must share a season universe");
    }
    return null_threshold_counts(*ei.season_days, ei.size(), ej.size(), params, pair_seed);
}

std::int64_t null_threshold_exact(std::size_t T, std::size_t n_i, std::size_t n_j, double q) {
    if (n_i > T || n_j > T) throw InvalidArgument("event counts must not exceed T");
    if (!(q > 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in (0, 1]");
    if (n_i == 0 || n_j == 0) return 0;
    const std::size_t k_min = n_i + n_j > T ? n_i + n_j - T : 0;
    const std::size_t k_max = std::min(n_i, n_j);
    if (q >= 1.0) return static_cast<std::int64_t>(k_max);

    auto log_choose = [](std::size_t n, std::size_t k) {
        return std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(k) + 1) -
               std::lgamma(static_cast<long double>(n - k) + 1);
    };
    const long double log_total = log_choose(T, n_j);
    long double cdf = 0.0L;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        cdf += std::exp(log_choose(n_i, k) + log_choose(T - n_i, n_j - k) - log_total);
        if (cdf >= static_cast<long double>(q) - 1e-15L) return static_cast<std::int64_t>(k);
    }
    return static_cast<std::int64_t>(k_max);
}

std::uint64_t pair_stream_seed(std::uint64_t seed, std::size_t i, std::size_t j) {
    return derive_seed(seed, std::min(i, j), std::max(i, j));
}

std::uint64_t count_stream_seed(std::uint64_t seed, std::size_t T, std::size_t n_i, std::size_t n_j) {
    const std::uint64_t lo = std::min(n_i, n_j);
    const std::uint64_t hi = std::max(n_i, n_j);
    return derive_seed(seed ^ kCountStreamTag, T, (lo << 32) | hi);
}

double memoized_null_threshold(std::span<const std::int32_t> season_days, std::size_t n_i, std::size_t n_j,
                               const SyncParams& params) {
    const std::size_t T = season_days.size();
    return null_threshold_counts(season_days, std::min(n_i, n_j), std::max(n_i, n_j), params,
                                 count_stream_seed(params.seed, T, n_i, n_j));
}

SyncResult test_pair(const EventSeries& ei, const EventSeries& ej, const SyncParams& params) {
    params.validate();
    SyncResult r;
    if (ei.empty() || ej.empty()) return r;
    r.es = event_sync_weighted(ei.event_days, ej.event_days, params.tau_max, params.simultaneous_weight);
    r.threshold = uses_memo(params) ? memoized_null_threshold(*ei.season_days, ei.size(), ej.size(), params)
                                    : null_threshold(ei, ej, params, pair_stream_seed(params.seed, ei.node_id, ej.node_id));
    r.significant = r.es > 0.0 && r.es >= r.threshold;
    return r;
}

Network build_network(std::span<const EventSeries> series, const GridSpec& grid, const SyncParams& params,
                      unsigned threads) {
    params.validate();
    const std::size_t n = grid.size();
    if (series.size() != n) {
        throw InvalidArgument("got " + std::to_string(series.size()) + " event series for " + std::to_string(n) +
                              " grid nodes");
    }
    SeasonDays universe;
    for (std::size_t i = 0; i < n; ++i) {
        if (series[i].node_id != i) throw InvalidArgument("event series out of node order at " + std::to_string(i));
        if (!series[i].season_days) throw InvalidArgument("event series without a season universe");
        if (!universe) universe = series[i].season_days;
        if (*series[i].season_days != *universe) throw InvalidArgument("event series use different season universes");
    }
    if (n == 0) return Network(grid);

    // Memo table keyed by (min count, max count); T is shared by all nodes.
    std::map<std::pair<std::size_t, std::size_t>, double> memo;
    if (uses_memo(params)) {
        std::vector<std::size_t> counts;
        for (const auto& es : series) {
            if (!es.empty()) counts.push_back(es.size());
        }
        std::sort(counts.begin(), counts.end());
        counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
        std::vector<std::pair<std::size_t, std::size_t>> keys;
        for (std::size_t a = 0; a < counts.size(); ++a) {
            for (std::size_t b = a; b < counts.size(); ++b) keys.emplace_back(counts[a], counts[b]);
        }
        std::vector<double> thresholds(keys.size());
        parallel_for(keys.size(), threads, [&](std::size_t k) {
            thresholds[k] = memoized_null_threshold(*universe, keys[k].first, keys[k].second, params);
        });
        for (std::size_t k = 0; k < keys.size(); ++k) memo.emplace(keys[k], thresholds[k]);
    }

    std::vector<std::vector<Edge>> rows(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const auto& ei = series[i];
        if (ei.empty()) return;
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& ej = series[j];
            if (ej.empty()) continue;
            const double es =
                event_sync_weighted(ei.event_days, ej.event_days, params.tau_max, params.simultaneous_weight);
            if (es <= 0.0) continue;
            const double threshold =
                uses_memo(params)
                    ? memo.at({std::min(ei.size(), ej.size()), std::max(ei.size(), ej.size())})
                    : null_threshold(ei, ej, params, pair_stream_seed(params.seed, i, j));
            if (es >= threshold) rows[i].emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
    });
    std::vector<Edge> edges;
    for (auto& r : rows) edges.insert(edges.end(), r.begin(), r.end());
    return Network(grid, edges);
}

}  // namespace gridsync
