#include <doctest.h>

#include <cmath>

#include "gridsync/netmetrics.hpp"
#include "gridsync/surrogate.hpp"
#include "gridsync/synth.hpp"
#include "../support/oracles.hpp"
#include "../support/tmpdir.hpp"

using namespace gridsync;

namespace {

Network complete(const GridSpec& grid) {
    std::vector<Edge> e;
    for (std::uint32_t i = 0; i < grid.size(); ++i)
        for (std::uint32_t j = i + 1; j < grid.size(); ++j) e.emplace_back(i, j);
    return Network(grid, e);
}

DistanceProfile flat_profile(const GridSpec& grid, double p) {
    auto prof = estimate_profile(complete(grid), 50.0);
    for (auto& v : prof.prob) v = p;
    return prof;
}

}  // namespace

TEST_CASE("complete graph profile is 1 in every occupied bin") {
    const auto grid = synth::lattice_grid({5, 5, 40.0, 0.0, 0.0});
    const auto prof = estimate_profile(complete(grid), 50.0);
    for (std::size_t b = 0; b < prof.bins(); ++b)
        if (prof.pair_count[b] > 0) CHECK(prof.prob[b] == 1.0);
}

TEST_CASE("hard-cutoff profile counts pairs like a brute-force binning") {
    const auto grid = synth::lattice_grid({8, 8, 37.0, 0.0, 0.0});
    const auto net = synth::gen_embedded_network({grid, synth::HardCutoff{100.0}, 1});
    const auto prof = estimate_profile(net, 50.0);
    std::vector<std::size_t> pairs(prof.bins(), 0), links(prof.bins(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            const auto b = static_cast<std::size_t>(oracle::chord_distance_km(grid[i], grid[j]) / 50.0);
            REQUIRE(b < prof.bins());
            ++pairs[b];
            links[b] += net.has_edge(i, j);
        }
    CHECK(pairs == prof.pair_count);
    CHECK(links == prof.link_count);
    CHECK(prof.prob[0] == 1.0);
    CHECK(prof.prob[1] == 1.0);
    CHECK(prof.prob.back() == 0.0);
}

TEST_CASE("constant profiles sample empty and complete surrogates") {
    const auto grid = synth::lattice_grid({4, 4, 60.0, 0.0, 0.0});
    CHECK(sample_surrogate(flat_profile(grid, 0.0), grid, 1).edge_count() == 0);
    CHECK(sample_surrogate(flat_profile(grid, 1.0), grid, 1).edge_count() == 16 * 15 / 2);
}

TEST_CASE("single-member ensemble equals that member") {
    const auto grid = synth::lattice_grid({5, 5, 50.0, 0.0, 0.0});
    const auto prof = estimate_profile(synth::gen_embedded_network({grid, synth::Exponential{0.8, 80.0}, 4}), 50.0);
    const Metric ms[] = {Metric::DC, Metric::BC};
    const auto stats = ensemble_stats(prof, grid, ms, 1, 77, 1);
    const auto member = sample_surrogate(prof, grid, member_stream_seed(77, 0));
    CHECK(stats[0].mean == degree(member).values);
    CHECK(stats[1].mean == betweenness(member, 1).values);
}

TEST_CASE("ensemble mean degree is within 3 sigma of the analytic expectation") {
    const auto grid = synth::lattice_grid({6, 6, 50.0, 0.0, 0.0});
    const auto prof = estimate_profile(synth::gen_embedded_network({grid, synth::Exponential{0.9, 70.0}, 2}), 50.0);
    const Metric ms[] = {Metric::DC};
    const std::size_t M = 200;
    const auto stats = ensemble_stats(prof, grid, ms, M, 123, 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double mu = 0, var = 0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (i == j) continue;
            const double p = prof.probability(oracle::chord_distance_km(grid[i], grid[j]));
            mu += p;
            var += p * (1 - p);
        }
        CHECK(std::fabs(stats[0].mean[i] - mu) <= 3 * std::sqrt(var / M) + 1e-12);
    }
}

TEST_CASE("ensemble means do not depend on the thread count") {
    const auto grid = synth::lattice_grid({6, 6, 50.0, 0.0, 0.0});
    const auto prof = estimate_profile(synth::gen_embedded_network({grid, synth::Exponential{0.9, 70.0}, 2}), 50.0);
    const Metric ms[] = {Metric::DC, Metric::CC, Metric::MGD, Metric::BC};
    const auto a = ensemble_stats(prof, grid, ms, 37, 9, 1);
    const auto b = ensemble_stats(prof, grid, ms, 37, 9, 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(a[k].mean == b[k].mean);
}

TEST_CASE("a far-away node has zero surrogate degree") {
    const auto core = synth::lattice_grid({4, 4, 30.0, 0.0, 0.0});
    std::vector<GeoPoint> pts(core.nodes().begin(), core.nodes().end());
    pts.push_back({20.0, 20.0});
    const GridSpec grid(pts);
    std::vector<Edge> e;
    for (std::uint32_t i = 0; i < 16; ++i)
        for (std::uint32_t j = i + 1; j < 16; ++j) e.emplace_back(i, j);
    const auto prof = estimate_profile(Network(grid, e), 50.0);
    const Metric ms[] = {Metric::DC};
    const auto stats = ensemble_stats(prof, grid, ms, 20, 1, 1);
    CHECK(stats[0].mean[16] == 0.0);
    CHECK(stats[0].zero_mean_nodes == std::vector<std::size_t>{16});
}

TEST_CASE("profile and statistics files round-trip") {
    TempDir dir;
    const auto grid = synth::lattice_grid({4, 4, 50.0, 0.0, 0.0});
    const auto prof = estimate_profile(synth::gen_embedded_network({grid, synth::Exponential{0.7, 60.0}, 3}), 50.0);
    write_profile(prof, dir / "p.csv");
    const auto back = read_profile(dir / "p.csv");
    CHECK(back.prob == prof.prob);
    CHECK(back.pair_count == prof.pair_count);
    const Metric ms[] = {Metric::DC, Metric::CC};
    const auto stats = ensemble_stats(prof, grid, ms, 5, 1, 1);
    write_surrogate_stats(stats, dir / "s.csv");
    const auto sb = read_surrogate_stats(dir / "s.csv");
    REQUIRE(sb.size() == 2);
    CHECK(sb[1].mean == stats[1].mean);
    CHECK(sb[1].ensemble_size == 5);
}
