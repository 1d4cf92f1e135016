#include "gridsync/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "gridsync/error.hpp"
#include "gridsync/grid_io.hpp"

namespace gridsync {
namespace {

using Rgb = std::array<std::uint8_t, 3>;

constexpr Rgb kBackground{255, 255, 255};
constexpr Rgb kUndefined{255, 0, 255};

Rgb ramp(Palette palette, double t) {
    t = std::clamp(t, 0.0, 1.0);
    static constexpr std::array<Rgb, 5> viridis{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    static constexpr std::array<Rgb, 3> heat{{{0, 0, 0}, {220, 40, 0}, {255, 255, 160}}};
    auto interpolate = [t](auto const& stops) {
        const double pos = t * static_cast<double>(stops.size() - 1);
        const auto k = std::min(static_cast<std::size_t>(pos), stops.size() - 2);
        const double f = pos - static_cast<double>(k);
        Rgb out{};
        for (std::size_t c = 0; c < 3; ++c) {
            out[c] = static_cast<std::uint8_t>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c])));
        }
        return out;
    };
    switch (palette) {
        case Palette::viridis: return interpolate(viridis);
        case Palette::heat: return interpolate(heat);
        case Palette::gray: {
            const auto g = static_cast<std::uint8_t>(std::lround(255.0 * t));
            return {g, g, g};
        }
    }
    return kBackground;
}

double min_spacing(std::vector<double> coords) {
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < coords.size(); ++k) best = std::min(best, coords[k] - coords[k - 1]);
    return best;
}

}  // namespace

std::optional<Palette> parse_palette(std::string_view s) {
    if (s == "viridis") return Palette::viridis;
    if (s == "gray") return Palette::gray;
    if (s == "heat") return Palette::heat;
    return std::nullopt;
}

RasterInfo render_map(std::span<const double> values, std::span<const std::uint8_t> defined, const GridSpec& grid,
                      const std::filesystem::path& path, Palette palette,
                      std::optional<std::pair<double, double>> range) {
    if (values.empty()) throw InvalidArgument("cannot render an empty field");
    if (values.size() != grid.size() || defined.size() != grid.size()) {
        throw InvalidArgument("field and grid differ in size");
    }
    std::vector<double> lats, lons;
    for (const auto& p : grid.nodes()) {
        lats.push_back(p.lat);
        lons.push_back(p.lon);
    }
    const auto [lat_min, lat_max] = std::minmax_element(lats.begin(), lats.end());
    const auto [lon_min, lon_max] = std::minmax_element(lons.begin(), lons.end());
    const double dlat = min_spacing(lats);
    const double dlon = min_spacing(lons);

    RasterInfo info;
    info.height = std::isfinite(dlat) ? static_cast<std::size_t>(std::lround((*lat_max - *lat_min) / dlat)) + 1 : 1;
    info.width = std::isfinite(dlon) ? static_cast<std::size_t>(std::lround((*lon_max - *lon_min) / dlon)) + 1 : 1;

    if (range) {
        std::tie(info.lo, info.hi) = *range;
    } else {
        info.lo = std::numeric_limits<double>::infinity();
        info.hi = -info.lo;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!defined[i] || !std::isfinite(values[i])) continue;
            info.lo = std::min(info.lo, values[i]);
            info.hi = std::max(info.hi, values[i]);
        }
        if (!std::isfinite(info.lo)) info.lo = info.hi = 0.0;
    }

    std::vector<Rgb> pixels(info.width * info.height, kBackground);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto row = std::isfinite(dlat) ? static_cast<std::size_t>(std::lround((*lat_max - grid[i].lat) / dlat)) : 0;
        const auto col = std::isfinite(dlon) ? static_cast<std::size_t>(std::lround((grid[i].lon - *lon_min) / dlon)) : 0;
        Rgb color = kUndefined;
        if (defined[i] && std::isfinite(values[i])) {
            const double t = info.hi > info.lo ? (values[i] - info.lo) / (info.hi - info.lo) : 0.0;
            color = ramp(palette, t);
        }
        pixels[row * info.width + col] = color;
    }

    std::string out = "P6\n" + std::to_string(info.width) + " " + std::to_string(info.height) + "\n255\n";
    out.reserve(out.size() + pixels.size() * 3);
    for (const auto& p : pixels) out.append(reinterpret_cast<const char*>(p.data()), 3);
    write_file(path, out);

    std::string legend = "min " + format_number(info.lo) + "\nmax " + format_number(info.hi) + "\nwidth " +
                         std::to_string(info.width) + "\nheight " + std::to_string(info.height) +
                         "\nundefined magenta\nno-node white\n";
    write_file(std::filesystem::path(path.string() + ".legend.txt"), legend);
    return info;
}

}  // namespace gridsync
