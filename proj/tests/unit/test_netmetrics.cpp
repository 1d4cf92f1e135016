#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "gridsync/error.hpp"
#include "gridsync/netmetrics.hpp"
#include "../support/oracles.hpp"

using namespace gridsync;

namespace {

GridSpec line_grid(std::size_t n) {
    std::vector<GeoPoint> pts;
    for (std::size_t k = 0; k < n; ++k) pts.push_back({0.0, static_cast<double>(k)});
    return GridSpec(pts);
}

Network complete(std::size_t n) {
    std::vector<Edge> e;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return Network(line_grid(n), e);
}

}  // namespace

TEST_CASE("haversine") {
    CHECK(haversine_km({10, 20}, {10, 20}) == 0.0);
    CHECK(haversine_km({0, 0}, {0, 90}) == doctest::Approx(std::acos(-1.0) * 6371.0 / 2).epsilon(1e-14));
    CHECK(std::fabs(haversine_km({0, 0}, {0.5, 0}) - oracle::law_of_cosines_km({0, 0}, {0.5, 0})) < 1e-6);
    CHECK(haversine_km({35, -100}, {36, -99}) == doctest::Approx(oracle::chord_distance_km({35, -100}, {36, -99})));
}

TEST_CASE("degree") {
    CHECK(degree(Network(line_grid(4))).values == std::vector<double>(4, 0.0));
    CHECK(degree(complete(5)).values == std::vector<double>(5, 4.0));
}

TEST_CASE("clustering") {
    CHECK(clustering(complete(3)).values == std::vector<double>(3, 1.0));
    const std::vector<Edge> star{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    const auto cc = clustering(Network(line_grid(5), star));
    CHECK(cc.values[0] == 0.0);
    CHECK(cc.defined[0] == 1);
    CHECK(cc.defined[1] == 0);
}

TEST_CASE("mean geographic distance") {
    const std::vector<Edge> one{{0, 1}};
    const auto net = Network(line_grid(3), one);
    const auto mgd = mean_geo_distance(net);
    CHECK(mgd.values[0] == haversine_km(net.grid()[0], net.grid()[1]));
    CHECK(mgd.defined[2] == 0);
    CHECK(mgd.values[2] == 0.0);
}

TEST_CASE("betweenness") {
    const std::vector<Edge> path{{0, 1}, {1, 2}};
    const auto bc = betweenness(Network(line_grid(3), path), 1);
    CHECK(bc.values == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(betweenness(complete(6), 1).values == std::vector<double>(6, 0.0));
    CHECK_THROWS_AS(betweenness(Network(line_grid(2)), 1), InvalidArgument);
}

TEST_CASE("log BC") {
    MetricField bc(Metric::BC, 2);
    bc.values = {0.0, 1.0};
    const auto l = log_bc(bc);
    CHECK(l.values[0] == 0.0);
    CHECK(l.values[1] == doctest::Approx(0.693147).epsilon(1e-6));
}

TEST_CASE("metrics match brute-force oracles on random graphs") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> size(3, 40);
    std::uniform_real_distribution<double> density(0.05, 0.5);
    for (int g = 0; g < 100; ++g) {
        const auto net = oracle::random_graph(rng, size(rng), density(rng));
        const auto a = oracle::adjacency(net);
        CHECK(degree(net).values == oracle::degree(a));
        CHECK(clustering(net).values == oracle::clustering(a));
        const auto bc = betweenness(net, 1 + g % 3);
        const auto bc_ref = oracle::betweenness(a);
        const auto mgd = mean_geo_distance(net);
        const auto mgd_ref = oracle::mean_distance(a, net.grid());
        for (std::size_t i = 0; i < net.size(); ++i) {
            CHECK(std::fabs(bc.values[i] - bc_ref[i]) <= 1e-9);
            CHECK(std::fabs(mgd.values[i] - mgd_ref[i]) <= 1e-9 * std::max(1.0, mgd_ref[i]));
        }
    }
}

TEST_CASE("metrics are invariant under node relabeling") {
    std::mt19937_64 rng(5);
    const auto net = oracle::random_graph(rng, 25, 0.2);
    std::vector<std::size_t> perm(25);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto moved = net.relabeled(perm);
    const auto bc = betweenness(net, 1), bc2 = betweenness(moved, 1);
    const auto dc = degree(net), dc2 = degree(moved);
    for (std::size_t i = 0; i < 25; ++i) {
        CHECK(dc.values[i] == dc2.values[perm[i]]);
        CHECK(bc.values[i] == doctest::Approx(bc2.values[perm[i]]).epsilon(1e-12));
    }
}
