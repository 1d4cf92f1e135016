#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "gridsync/events.hpp"
#include "gridsync/grid.hpp"
#include "gridsync/network.hpp"

namespace gridsync::synth {

/// rows x cols nodes, row-major, centred on (lat0, lon0) with equal
/// spacing in km along both axes (equirectangular, meant for low latitudes).
struct RectLattice {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double spacing_km = 50.0;
    double lat0 = 0.0;
    double lon0 = 0.0;
};

GridSpec lattice_grid(const RectLattice& layout);

struct HardCutoff {
    double d0_km = 0.0;
};

struct Exponential {
    double p0 = 1.0;
    double lambda_km = 100.0;
};

struct NetSpec {
    std::variant<RectLattice, GridSpec> layout;
    std::variant<HardCutoff, Exponential> link_model;
    std::uint64_t seed = 0;
};

/// Links each pair independently per the link model on haversine distance.
/// Throws InvalidArgument for fewer than 3 nodes or bad parameters.
Network gen_embedded_network(const NetSpec& spec);

/// First `T` days of consecutive JJA seasons starting in `first_year`.
SeasonDays jja_universe(std::size_t T, int first_year = 1991);

struct EventSpec {
    GridSpec grid;
    std::size_t T = 2760;
    double base_rate = 0.02;
    std::vector<std::vector<std::size_t>> cluster_groups;
    double rho = 0.0;
    std::uint64_t seed = 0;
};

/// Per day, each group fires jointly with probability rho and each node
/// fires alone with base_rate; consecutive-day runs are then deduplicated.
std::vector<EventSeries> gen_event_field(const EventSpec& spec);

/// Daily precipitation-like field on a lattice whose extreme days follow
/// the same group/base firing scheme as gen_event_field.
struct GriddedSpec {
    RectLattice layout{8, 8, 55.0, 40.0, -100.0};
    int first_year = 1991;
    int n_years = 5;
    double wet_prob = 0.45;
    double base_rate = 0.02;
    std::vector<std::vector<std::size_t>> cluster_groups;
    double rho = 0.04;
    std::uint64_t seed = 0;
};

GriddedSeries gen_gridded_field(const GriddedSpec& spec);

struct DivergenceSpec {
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    double s = 1.0;
    double eps_scale = 1.0;
};

/**
 * Paired samples (x, y) with y_i = x_i / (s + eps_i). About one node in ten
 * gets a denominator between 0.01 s and 0.1 s, mimicking near-isolated nodes;
 * the rest get eps_i in [0, 0.5 s]. eps_scale scales every eps_i, so
 * eps_scale = 0 with s = 1 gives y = x.
 */
std::pair<std::vector<double>, std::vector<double>> gen_divergence_fixture(const DivergenceSpec& spec);

}  // namespace gridsync::synth
