#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridsync/calendar.hpp"
#include "gridsync/events.hpp"
#include "gridsync/grid.hpp"
#include "gridsync/metric_field.hpp"
#include "gridsync/network.hpp"

namespace gridsync {

enum class GridFormat { binary, csv };

std::optional<GridFormat> parse_grid_format(std::string_view s);

/// Reads a CNG1 binary file or a long-format CSV. Throws FormatError with the
/// offending byte offset or line number.
GriddedSeries load_gridded(const std::filesystem::path& path, GridFormat format);
void write_gridded(const GriddedSeries& gs, const std::filesystem::path& path, GridFormat format);

/// Days whose calendar month lies in the season, original day indices kept.
GriddedSeries extract_season(const GriddedSeries& gs, Season season);

/// Shortest decimal text that reads back to the same double; "nan" for NaN.
std::string format_number(double v);
std::string format_number(float v);

/// Metric CSV `node_id,lat,lon,value` plus `<path>.json` recording the metric
/// name and undefined nodes.
void write_metric_field(const MetricField& mf, const GridSpec& grid, const std::filesystem::path& path);

struct LoadedMetric {
    MetricField field;
    GridSpec grid;
};
LoadedMetric read_metric_field(const std::filesystem::path& path);

/// Edge list `i,j` with i < j.
void write_edge_list(const Network& net, const std::filesystem::path& path);
Network read_edge_list(const std::filesystem::path& path, GridSpec grid);

/// Event-series CSV `node_id,day_index` plus a JSON sidecar `<path>.json`
/// carrying T, season, threshold spec, dedup flag and the season day universe.
void write_event_set(const EventSet& set, Season season, const std::filesystem::path& path);

struct LoadedEvents {
    EventSet set;
    Season season = Season::JJA;
};
LoadedEvents read_event_set(const std::filesystem::path& path);

/// Node table `node_id,lat,lon`.
void write_grid_nodes(const GridSpec& grid, const std::filesystem::path& path);
GridSpec read_grid_nodes(const std::filesystem::path& path);

/// Reads the whole file as bytes; throws Error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Replaces `path` atomically, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace gridsync
