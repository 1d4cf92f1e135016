#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "gridsync/grid.hpp"
#include "gridsync/metric_field.hpp"
#include "gridsync/surrogate.hpp"

namespace gridsync {

enum class CorrectionMethod { subtract, divide };

std::string_view to_string(CorrectionMethod m);
std::optional<CorrectionMethod> parse_correction_method(std::string_view s);

/// A metric corrected against its surrogate-ensemble mean, then min-max
/// normalized over the nodes where the correction is defined.
struct CorrectedField {
    CorrectionMethod method = CorrectionMethod::subtract;
    Metric metric = Metric::DC;
    std::vector<double> raw;
    std::vector<double> surrogate_mean;
    std::vector<double> corrected;   // NaN where undefined
    std::vector<double> normalized;  // NaN where undefined
    std::vector<std::uint8_t> defined;
    double norm_min = 0.0;
    double norm_max = 0.0;
    std::vector<std::size_t> undefined_nodes;

    std::size_t size() const noexcept { return raw.size(); }
};

/// raw - mean, normalized over all nodes. Throws DegenerateFieldError when
/// the corrected field is constant.
CorrectedField correct_subtract(const MetricField& raw, const SurrogateStats& sur);

/// raw / mean where mean > 0; nodes with zero mean are undefined and left
/// out of the normalization bounds. Throws DegenerateFieldError when no node
/// is defined or the defined values are constant.
CorrectedField correct_divide(const MetricField& raw, const SurrogateStats& sur);

CorrectedField apply_correction(CorrectionMethod method, const MetricField& raw, const SurrogateStats& sur);

/// Min-max rescale of `values` restricted to `defined`; returns (min, max).
std::pair<double, double> minmax_normalize(const std::vector<double>& values, const std::vector<std::uint8_t>& defined,
                                           std::vector<double>& out);

struct PairedSample {
    std::vector<double> x;  // subtraction
    std::vector<double> y;  // division
    std::vector<std::size_t> nodes;
};

/// Per-node values defined under both corrections, aligned by node id.
/// `normalized` selects normalized or raw corrected values.
PairedSample paired_fields(const CorrectedField& sub, const CorrectedField& div, bool normalized = true);

/// `node_id,lat,lon,raw,surrogate_mean,corrected,normalized,defined`
void write_corrected_field(const CorrectedField& cf, const GridSpec& grid, const std::filesystem::path& path);
CorrectedField read_corrected_field(const std::filesystem::path& path, CorrectionMethod method, Metric metric);

}  // namespace gridsync
