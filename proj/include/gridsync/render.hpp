#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <utility>

#include "gridsync/grid.hpp"

namespace gridsync {

enum class Palette { viridis, gray, heat };

std::optional<Palette> parse_palette(std::string_view s);

struct RasterInfo {
    std::size_t width = 0;
    std::size_t height = 0;
    double lo = 0.0;
    double hi = 0.0;
};

/**
 * Writes a binary PPM with one pixel per grid cell, north up. Node cells
 * are located at the smallest lat/lon spacing found in the grid; values are
 * mapped linearly over `range` (default: min and max of defined values).
 * Undefined nodes are drawn magenta, cells without a node white. A text
 * legend with the value range is written to `<path>.legend.txt`.
 */
RasterInfo render_map(std::span<const double> values, std::span<const std::uint8_t> defined, const GridSpec& grid,
                      const std::filesystem::path& path, Palette palette,
                      std::optional<std::pair<double, double>> range = std::nullopt);

}  // namespace gridsync
