#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gridsync/grid.hpp"

namespace gridsync {

enum class Direction { above, below };
enum class Support { positive_only, all };

std::string_view to_string(Direction d);
std::string_view to_string(Support s);
std::optional<Direction> parse_direction(std::string_view s);
std::optional<Support> parse_support(std::string_view s);

struct ThresholdSpec {
    double percentile = 95.0;  // in (0, 100)
    Direction direction = Direction::above;
    Support support = Support::positive_only;
    /// positive_only keeps values strictly greater than this.
    double wet_threshold = 0.0;
};

/// Nodes with fewer finite support values are unusable.
inline constexpr std::size_t kMinSupportValues = 20;

/// Linear-interpolation quantile: h = (n-1)p, interpolated between the
/// floor and ceil order statistics. `values` need not be sorted.
double quantile_linear(std::vector<double> values, double p);

/// Local event threshold, or nullopt when fewer than kMinSupportValues
/// finite values fall in the support set.
std::optional<double> compute_threshold(std::span<const float> values, const ThresholdSpec& spec);

using SeasonDays = std::shared_ptr<const std::vector<std::int32_t>>;

/// Sorted event day indices at one node within a season's day universe.
struct EventSeries {
    std::size_t node_id = 0;
    std::vector<std::int32_t> event_days;
    SeasonDays season_days;

    std::size_t size() const noexcept { return event_days.size(); }
    bool empty() const noexcept { return event_days.empty(); }
    /// T: size of the season's day universe.
    std::size_t n_days() const noexcept { return season_days ? season_days->size() : 0; }
};

/// Days whose value strictly exceeds (above) or falls below (below) the threshold.
/// NaN is never an event.
EventSeries to_event_series(std::size_t node_id, std::span<const float> values, const SeasonDays& days,
                            double threshold, Direction direction);

/// Keeps only the first day of each run of consecutive calendar days.
EventSeries dedup_consecutive(const EventSeries& es);

/// Event series for every node of a seasonal field.
struct EventSet {
    ThresholdSpec spec;
    bool dedup = true;
    SeasonDays season_days;
    std::vector<EventSeries> series;     // one per grid node
    std::vector<double> thresholds;      // NaN at unusable nodes
    std::vector<std::size_t> unusable;   // node ids with too little support
};

EventSet detect_events(const GriddedSeries& seasonal, const ThresholdSpec& spec, bool dedup = true,
                       unsigned threads = 0);

}  // namespace gridsync
