#include "gridsync/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gridsync/calendar.hpp"
#include "gridsync/error.hpp"
#include "gridsync/netmetrics.hpp"
#include "gridsync/random.hpp"

namespace gridsync::synth {
namespace {

constexpr double kKmPerDegree = kEarthRadiusKm * std::numbers::pi / 180.0;

double exponential(Rng& rng, double mean) { return -mean * std::log1p(-rng.uniform()); }

/// Per-day firing pattern shared by the event and gridded generators.
std::vector<std::uint8_t> fire_day(Rng& rng, std::size_t n, const std::vector<std::vector<std::size_t>>& groups,
                                   double rho, double base_rate) {
    std::vector<std::uint8_t> fired(n, 0);
    for (const auto& g : groups) {
        if (rng.bernoulli(rho)) {
            for (auto node : g) fired.at(node) = 1;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.bernoulli(base_rate)) fired[i] = 1;
    }
    return fired;
}

}  // namespace

GridSpec lattice_grid(const RectLattice& layout) {
    if (layout.rows * layout.cols < 3) throw InvalidArgument("lattice needs at least 3 nodes");
    if (!(layout.spacing_km > 0.0)) throw InvalidArgument("lattice spacing must be positive");
    const double dlat = layout.spacing_km / kKmPerDegree;
    const double dlon = dlat / std::cos(layout.lat0 * std::numbers::pi / 180.0);
    std::vector<GeoPoint> nodes;
    nodes.reserve(layout.rows * layout.cols);
    for (std::size_t r = 0; r < layout.rows; ++r) {
        for (std::size_t c = 0; c < layout.cols; ++c) {
            nodes.push_back({layout.lat0 + (static_cast<double>(r) - (static_cast<double>(layout.rows) - 1) / 2) * dlat,
                             layout.lon0 + (static_cast<double>(c) - (static_cast<double>(layout.cols) - 1) / 2) * dlon});
        }
    }
    return GridSpec(std::move(nodes));
}

Network gen_embedded_network(const NetSpec& spec) {
    GridSpec grid = std::holds_alternative<RectLattice>(spec.layout) ? lattice_grid(std::get<RectLattice>(spec.layout))
                                                                     : std::get<GridSpec>(spec.layout);
    const std::size_t n = grid.size();
    if (n < 3) throw InvalidArgument("embedded network needs at least 3 nodes");

    std::vector<Edge> edges;
    if (const auto* cut = std::get_if<HardCutoff>(&spec.link_model)) {
        if (!(cut->d0_km > 0.0)) throw InvalidArgument("cutoff distance must be positive");
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (haversine_km(grid[i], grid[j]) <= cut->d0_km) {
                    edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
                }
            }
        }
    } else {
        const auto& ex = std::get<Exponential>(spec.link_model);
        if (!(ex.p0 > 0.0 && ex.p0 <= 1.0)) throw InvalidArgument("p0 must lie in (0, 1]");
        if (!(ex.lambda_km > 0.0)) throw InvalidArgument("lambda must be positive");
        Rng rng(derive_seed(spec.seed, 0x6e6574));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double p = ex.p0 * std::exp(-haversine_km(grid[i], grid[j]) / ex.lambda_km);
                if (rng.bernoulli(p)) edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
            }
        }
    }
    return Network(std::move(grid), edges);
}

SeasonDays jja_universe(std::size_t T, int first_year) {
    std::vector<std::int32_t> days;
    days.reserve(T);
    for (int year = first_year; days.size() < T; ++year) {
        const std::int32_t start = day_index(year, 6, 1);
        for (std::int32_t d = 0; d < 92 && days.size() < T; ++d) days.push_back(start + d);
    }
    return std::make_shared<const std::vector<std::int32_t>>(std::move(days));
}

std::vector<EventSeries> gen_event_field(const EventSpec& spec) {
    if (!(spec.base_rate >= 0.0 && spec.base_rate <= 1.0) || !(spec.rho >= 0.0 && spec.rho <= 1.0)) {
        throw InvalidArgument("rates must lie in [0, 1]");
    }
    const std::size_t n = spec.grid.size();
    for (const auto& g : spec.cluster_groups) {
        for (auto node : g) {
            if (node >= n) throw InvalidArgument("cluster group references node " + std::to_string(node));
        }
    }
    const SeasonDays days = jja_universe(spec.T);
    std::vector<EventSeries> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = EventSeries{i, {}, days};
    for (std::size_t k = 0; k < days->size(); ++k) {
        Rng rng(derive_seed(spec.seed, k));
        const auto fired = fire_day(rng, n, spec.cluster_groups, spec.rho, spec.base_rate);
        for (std::size_t i = 0; i < n; ++i) {
            if (fired[i]) out[i].event_days.push_back((*days)[k]);
        }
    }
    for (auto& es : out) es = dedup_consecutive(es);
    return out;
}

GriddedSeries gen_gridded_field(const GriddedSpec& spec) {
    GriddedSeries gs;
    gs.grid = lattice_grid(spec.layout);
    const std::size_t n = gs.grid.size();
    for (const auto& g : spec.cluster_groups) {
        for (auto node : g) {
            if (node >= n) throw InvalidArgument("cluster group references node " + std::to_string(node));
        }
    }
    const std::int32_t first = day_index(spec.first_year, 1, 1);
    const std::int32_t last = day_index(spec.first_year + spec.n_years, 1, 1);
    for (std::int32_t d = first; d < last; ++d) gs.days.push_back(d);
    const std::size_t n_days = gs.days.size();
    gs.values.assign(n * n_days, 0.0f);
    for (std::size_t k = 0; k < n_days; ++k) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(gs.days[k])));
        const auto fired = fire_day(rng, n, spec.cluster_groups, spec.rho, spec.base_rate);
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            if (fired[i]) {
                v = 40.0 + exponential(rng, 15.0);
            } else if (rng.bernoulli(spec.wet_prob)) {
                v = std::min(30.0, exponential(rng, 4.0));
            }
            gs.values[i * n_days + k] = static_cast<float>(v);
        }
    }
    return gs;
}

std::pair<std::vector<double>, std::vector<double>> gen_divergence_fixture(const DivergenceSpec& spec) {
    if (spec.n < 30) throw InvalidArgument("divergence fixture needs n >= 30");
    Rng rng(derive_seed(spec.seed, 0x646976));
    std::vector<double> x(spec.n), y(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        x[i] = 0.1 + 0.9 * rng.uniform();
        double eps;
        if (rng.bernoulli(0.1)) {
            const double delta = 0.01 + 0.09 * rng.uniform();
            eps = -spec.s * (1.0 - delta);
        } else {
            eps = 0.5 * spec.s * rng.uniform();
        }
        y[i] = x[i] / (spec.s + spec.eps_scale * eps);
    }
    return {std::move(x), std::move(y)};
}

}  // namespace gridsync::synth
