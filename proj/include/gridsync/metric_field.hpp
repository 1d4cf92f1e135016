#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace gridsync {

enum class Metric { DC, CC, MGD, BC };

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view s);

/// One value per node. Nodes where the metric is mathematically undefined
/// (CC with degree < 2, MGD with degree 0) carry their convention value 0
/// and defined[i] == 0.
struct MetricField {
    Metric metric = Metric::DC;
    std::vector<double> values;
    std::vector<std::uint8_t> defined;

    MetricField() = default;
    MetricField(Metric m, std::size_t n) : metric(m), values(n, 0.0), defined(n, 1) {}

    std::size_t size() const noexcept { return values.size(); }
    std::size_t undefined_count() const;
};

}  // namespace gridsync
