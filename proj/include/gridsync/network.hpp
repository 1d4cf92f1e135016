#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gridsync/grid.hpp"

namespace gridsync {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Undirected, unweighted graph over grid nodes in compressed sparse row
/// form. Neighbor lists are sorted and duplicate-free; no self loops.
class Network {
public:
    Network() = default;
    /// Builds from an edge list in any order; duplicates collapse, self loops
    /// and out-of-range endpoints throw InvalidArgument.
    Network(GridSpec grid, std::span<const Edge> edges);
    /// Edgeless network.
    explicit Network(GridSpec grid);

    std::size_t size() const noexcept { return grid_.size(); }
    std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }
    const GridSpec& grid() const noexcept { return grid_; }

    std::span<const std::uint32_t> neighbors(std::size_t i) const {
        return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
    bool has_edge(std::size_t i, std::size_t j) const;

    /// Edges (i, j) with i < j in lexicographic order.
    std::vector<Edge> edges() const;

    /// Same topology over a relabeled grid; `perm[old] = new`.
    Network relabeled(std::span<const std::size_t> perm) const;

private:
    GridSpec grid_;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::uint32_t> neighbors_;
};

}  // namespace gridsync
