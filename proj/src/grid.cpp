#include "gridsync/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridsync/error.hpp"

namespace gridsync {

bool operator==(const GeoPoint& a, const GeoPoint& b) { return a.lat == b.lat && a.lon == b.lon; }

bool operator==(const GridSpec& a, const GridSpec& b) { return a.nodes_ == b.nodes_; }

GridSpec::GridSpec(std::vector<GeoPoint> nodes) : nodes_(std::move(nodes)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& p = nodes_[i];
        if (!(p.lat >= -90.0 && p.lat <= 90.0) || !(p.lon >= -180.0 && p.lon <= 180.0)) {
            std::ostringstream msg;
            msg << "node " << i << ": coordinates out of range (" << p.lat << ", " << p.lon << ")";
            throw InvalidArgument(msg.str());
        }
    }
    std::vector<std::size_t> order(nodes_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = nodes_[a];
        const auto& pb = nodes_[b];
        return pa.lat != pb.lat ? pa.lat < pb.lat : pa.lon < pb.lon;
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (nodes_[order[k]] == nodes_[order[k - 1]]) {
            std::ostringstream msg;
            msg << "nodes " << order[k - 1] << " and " << order[k] << " share coordinates";
            throw InvalidArgument(msg.str());
        }
    }
}

void GriddedSeries::validate() const {
    if (values.size() != grid.size() * days.size()) {
        throw InvalidArgument("value matrix is not n_nodes x n_days");
    }
    for (std::size_t k = 1; k < days.size(); ++k) {
        if (days[k] <= days[k - 1]) {
            throw InvalidArgument("day indices not strictly increasing at position " + std::to_string(k));
        }
    }
}

}  // namespace gridsync
