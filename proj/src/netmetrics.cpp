#include "gridsync/netmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gridsync/error.hpp"
#include "gridsync/parallel.hpp"

namespace gridsync {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr std::size_t kSourceBlock = 32;

std::size_t count_common(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    std::size_t count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

}  // namespace

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = (b.lat - a.lat) * kDegToRad;
    const double dlambda = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dphi / 2);
    const double s2 = std::sin(dlambda / 2);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

MetricField degree(const Network& net) {
    MetricField mf(Metric::DC, net.size());
    for (std::size_t i = 0; i < net.size(); ++i) mf.values[i] = static_cast<double>(net.degree(i));
    return mf;
}

MetricField clustering(const Network& net) {
    MetricField mf(Metric::CC, net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto nb = net.neighbors(i);
        const std::size_t k = nb.size();
        if (k < 2) {
            mf.defined[i] = 0;
            continue;
        }
        // Each neighbor-neighbor link is seen from both ends.
        std::size_t twice_links = 0;
        for (auto j : nb) twice_links += count_common(nb, net.neighbors(j));
        mf.values[i] = static_cast<double>(twice_links) / static_cast<double>(k * (k - 1));
    }
    return mf;
}

MetricField mean_geo_distance(const Network& net) {
    MetricField mf(Metric::MGD, net.size());
    const auto& grid = net.grid();
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto nb = net.neighbors(i);
        if (nb.empty()) {
            mf.defined[i] = 0;
            continue;
        }
        CompensatedSum sum;
        for (auto j : nb) sum.add(haversine_km(grid[i], grid[j]));
        mf.values[i] = sum.value() / static_cast<double>(nb.size());
    }
    return mf;
}

MetricField betweenness(const Network& net, unsigned threads) {
    const std::size_t n = net.size();
    if (n < 3) throw InvalidArgument("betweenness needs at least 3 nodes");

    const std::size_t n_blocks = (n + kSourceBlock - 1) / kSourceBlock;
    std::vector<std::vector<double>> partial(n_blocks);

    parallel_for(n_blocks, threads, [&](std::size_t block) {
        std::vector<double> acc(n, 0.0);
        std::vector<std::int64_t> dist(n);
        std::vector<double> sigma(n);
        std::vector<double> delta(n);
        std::vector<std::uint32_t> order;
        order.reserve(n);
        const std::size_t first = block * kSourceBlock;
        const std::size_t last = std::min(n, first + kSourceBlock);
        for (std::size_t s = first; s < last; ++s) {
            std::fill(dist.begin(), dist.end(), -1);
            std::fill(sigma.begin(), sigma.end(), 0.0);
            std::fill(delta.begin(), delta.end(), 0.0);
            order.clear();
            dist[s] = 0;
            sigma[s] = 1.0;
            order.push_back(static_cast<std::uint32_t>(s));
            for (std::size_t head = 0; head < order.size(); ++head) {
                const auto v = order[head];
                for (auto w : net.neighbors(v)) {
                    if (dist[w] < 0) {
                        dist[w] = dist[v] + 1;
                        order.push_back(w);
                    }
                    if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
                }
            }
            // Reverse BFS order: every successor is settled before its predecessors.
            for (std::size_t k = order.size(); k-- > 1;) {
                const auto w = order[k];
                for (auto v : net.neighbors(w)) {
                    if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
                acc[w] += delta[w];
            }
        }
        partial[block] = std::move(acc);
    });

    MetricField mf(Metric::BC, n);
    const double norm = static_cast<double>(n - 1) * static_cast<double>(n - 2);
    for (std::size_t i = 0; i < n; ++i) {
        CompensatedSum sum;
        for (const auto& p : partial) sum.add(p[i]);
        mf.values[i] = sum.value() / norm;
    }
    return mf;
}

MetricField log_bc(const MetricField& bc) {
    MetricField out = bc;
    for (auto& v : out.values) {
        if (v < 0) throw InvalidArgument("log_bc expects non-negative betweenness");
        v = std::log1p(v);
    }
    return out;
}

MetricField compute_metric(Metric m, const Network& net, unsigned threads) {
    switch (m) {
        case Metric::DC: return degree(net);
        case Metric::CC: return clustering(net);
        case Metric::MGD: return mean_geo_distance(net);
        case Metric::BC: return betweenness(net, threads);
    }
    throw InvalidArgument("unknown metric");
}

}  // namespace gridsync
