#include "gridsync/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridsync/error.hpp"
#include "gridsync/parallel.hpp"

namespace gridsync {

std::string_view to_string(Direction d) { return d == Direction::above ? "above" : "below"; }
std::string_view to_string(Support s) { return s == Support::positive_only ? "positive_only" : "all"; }

std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "above") return Direction::above;
    if (s == "below") return Direction::below;
    return std::nullopt;
}

std::optional<Support> parse_support(std::string_view s) {
    if (s == "positive_only") return Support::positive_only;
    if (s == "all") return Support::all;
    return std::nullopt;
}

double quantile_linear(std::vector<double> values, double p) {
    if (values.empty()) throw InvalidArgument("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("quantile level outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::optional<double> compute_threshold(std::span<const float> values, const ThresholdSpec& spec) {
    if (!(spec.percentile > 0.0 && spec.percentile < 100.0)) {
        throw InvalidArgument("percentile must lie in (0, 100)");
    }
    std::vector<double> support;
    support.reserve(values.size());
    for (float v : values) {
        if (!std::isfinite(v)) continue;
        if (spec.support == Support::positive_only && !(v > spec.wet_threshold)) continue;
        support.push_back(v);
    }
    if (support.size() < kMinSupportValues) return std::nullopt;
    return quantile_linear(std::move(support), spec.percentile / 100.0);
}

EventSeries to_event_series(std::size_t node_id, std::span<const float> values, const SeasonDays& days,
                            double threshold, Direction direction) {
    if (!std::isfinite(threshold)) throw InvalidArgument("event threshold must be finite");
    if (!days || days->size() != values.size()) {
        throw InvalidArgument("value series and season days differ in length");
    }
    EventSeries es{node_id, {}, days};
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double v = values[k];
        const bool hit = direction == Direction::above ? v > threshold : v < threshold;
        if (hit) es.event_days.push_back((*days)[k]);
    }
    return es;
}

EventSeries dedup_consecutive(const EventSeries& es) {
    EventSeries out{es.node_id, {}, es.season_days};
    out.event_days.reserve(es.event_days.size());
    // A run is broken by any calendar gap, so compare against the raw predecessor.
    for (std::size_t k = 0; k < es.event_days.size(); ++k) {
        if (k > 0 && es.event_days[k] == es.event_days[k - 1] + 1) continue;
        out.event_days.push_back(es.event_days[k]);
    }
    return out;
}

EventSet detect_events(const GriddedSeries& seasonal, const ThresholdSpec& spec, bool dedup, unsigned threads) {
    seasonal.validate();
    EventSet set;
    set.spec = spec;
    set.dedup = dedup;
    set.season_days = std::make_shared<const std::vector<std::int32_t>>(seasonal.days);
    const std::size_t n = seasonal.n_nodes();
    set.series.resize(n);
    set.thresholds.assign(n, std::numeric_limits<double>::quiet_NaN());

    parallel_for(n, threads, [&](std::size_t i) {
        const auto values = seasonal.node_values(i);
        const auto threshold = compute_threshold(values, spec);
        if (!threshold) {
            set.series[i] = EventSeries{i, {}, set.season_days};
            return;
        }
        set.thresholds[i] = *threshold;
        auto es = to_event_series(i, values, set.season_days, *threshold, spec.direction);
        set.series[i] = dedup ? dedup_consecutive(es) : std::move(es);
    });
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(set.thresholds[i])) set.unusable.push_back(i);
    }
    return set;
}

}  // namespace gridsync
