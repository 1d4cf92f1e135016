#include "gridsync/network.hpp"

#include <algorithm>
#include <string>

#include "gridsync/error.hpp"

namespace gridsync {

Network::Network(GridSpec grid) : grid_(std::move(grid)), offsets_(grid_.size() + 1, 0) {}

Network::Network(GridSpec grid, std::span<const Edge> edges) : grid_(std::move(grid)) {
    const std::size_t n = grid_.size();
    std::vector<Edge> directed;
    directed.reserve(edges.size() * 2);
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) {
            throw InvalidArgument("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                  ") references a node outside the grid");
        }
        if (a == b) throw InvalidArgument("self loop at node " + std::to_string(a));
        directed.emplace_back(a, b);
        directed.emplace_back(b, a);
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    offsets_.assign(n + 1, 0);
    neighbors_.reserve(directed.size());
    for (const auto& [a, b] : directed) {
        ++offsets_[a + 1];
        neighbors_.push_back(b);
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
}

bool Network::has_edge(std::size_t i, std::size_t j) const {
    const auto nb = neighbors(i);
    return std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(j));
}

std::vector<Edge> Network::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (std::size_t i = 0; i < size(); ++i) {
        for (auto j : neighbors(i)) {
            if (j > i) out.emplace_back(static_cast<std::uint32_t>(i), j);
        }
    }
    return out;
}

Network Network::relabeled(std::span<const std::size_t> perm) const {
    if (perm.size() != size()) throw InvalidArgument("permutation size mismatch");
    std::vector<GeoPoint> nodes(size());
    for (std::size_t i = 0; i < size(); ++i) nodes.at(perm[i]) = grid_[i];
    std::vector<Edge> mapped;
    for (const auto& [a, b] : edges()) {
        mapped.emplace_back(static_cast<std::uint32_t>(perm[a]), static_cast<std::uint32_t>(perm[b]));
    }
    return Network(GridSpec(std::move(nodes)), mapped);
}

}  // namespace gridsync
