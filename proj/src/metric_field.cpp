#include "gridsync/metric_field.hpp"

#include <algorithm>

namespace gridsync {

std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::DC: return "DC";
        case Metric::CC: return "CC";
        case Metric::MGD: return "MGD";
        case Metric::BC: return "BC";
    }
    return "?";
}

std::optional<Metric> parse_metric(std::string_view s) {
    for (auto m : {Metric::DC, Metric::CC, Metric::MGD, Metric::BC}) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

std::size_t MetricField::undefined_count() const {
    return static_cast<std::size_t>(std::count(defined.begin(), defined.end(), std::uint8_t{0}));
}

}  // namespace gridsync
