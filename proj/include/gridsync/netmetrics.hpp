#pragma once

#include "gridsync/grid.hpp"
#include "gridsync/metric_field.hpp"
#include "gridsync/network.hpp"

namespace gridsync {

inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance in km.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

/// Number of links per node.
MetricField degree(const Network& net);

/// Fraction of a node's neighbor pairs that are linked. Nodes with fewer
/// than two neighbors get 0 and are flagged undefined.
MetricField clustering(const Network& net);

/// Mean haversine distance to neighbors; isolated nodes get 0, undefined.
MetricField mean_geo_distance(const Network& net);

/**
 * Normalized shortest-path betweenness,
 *   BC(v) = sum over ordered pairs s != v != t of sigma_st(v) / sigma_st
 *           divided by (n-1)(n-2),
 * which equals twice the unordered-pair sum over the same denominator.
 * Pairs in different components contribute nothing and the denominator is
 * global. Sources are processed in fixed blocks whose partial sums are merged
 * in block order, so the result does not depend on the thread count.
 * Requires n >= 3.
 */
MetricField betweenness(const Network& net, unsigned threads = 0);

/// Elementwise ln(1 + BC); display only.
MetricField log_bc(const MetricField& bc);

MetricField compute_metric(Metric m, const Network& net, unsigned threads = 0);

}  // namespace gridsync
