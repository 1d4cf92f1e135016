#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gridsync {

struct GeoPoint {
    double lat = 0.0;  // degrees
    double lon = 0.0;  // degrees
};

/// Node locations of a grid; node ids are the indices 0..n-1.
class GridSpec {
public:
    GridSpec() = default;
    /// Validates coordinate ranges and uniqueness; throws InvalidArgument.
    explicit GridSpec(std::vector<GeoPoint> nodes);

    std::size_t size() const noexcept { return nodes_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }
    const GeoPoint& operator[](std::size_t i) const { return nodes_[i]; }
    std::span<const GeoPoint> nodes() const noexcept { return nodes_; }

    friend bool operator==(const GridSpec& a, const GridSpec& b);

private:
    std::vector<GeoPoint> nodes_;
};

/// Daily values for every node; values are stored node-major, NaN = missing.
struct GriddedSeries {
    GridSpec grid;
    std::vector<std::int32_t> days;  // days since 1970-01-01, strictly increasing
    std::vector<float> values;       // grid.size() x days.size()

    std::size_t n_nodes() const noexcept { return grid.size(); }
    std::size_t n_days() const noexcept { return days.size(); }
    std::span<const float> node_values(std::size_t node) const {
        return {values.data() + node * days.size(), days.size()};
    }

    /// Throws InvalidArgument when the shape or day ordering is broken.
    void validate() const;
};

bool operator==(const GeoPoint& a, const GeoPoint& b);

}  // namespace gridsync
