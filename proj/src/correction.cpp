#include "gridsync/correction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "gridsync/error.hpp"
#include "gridsync/grid_io.hpp"

namespace gridsync {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_shapes(const MetricField& raw, const SurrogateStats& sur) {
    if (raw.size() != sur.mean.size()) throw InvalidArgument("metric field and surrogate mean differ in node count");
    if (raw.metric != sur.metric) throw InvalidArgument("metric field and surrogate mean describe different metrics");
}

CorrectedField finish(CorrectedField cf) {
    for (std::size_t i = 0; i < cf.size(); ++i) {
        if (!cf.defined[i]) cf.undefined_nodes.push_back(i);
    }
    if (cf.undefined_nodes.size() == cf.size()) {
        throw DegenerateFieldError(std::string(to_string(cf.metric)) + "/" + std::string(to_string(cf.method)) +
                                   ": no node has a defined correction");
    }
    std::tie(cf.norm_min, cf.norm_max) = minmax_normalize(cf.corrected, cf.defined, cf.normalized);
    return cf;
}

double parse_double(std::string_view s, const std::filesystem::path& path, std::size_t line) {
    if (s == "nan") return kNaN;
    double v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError(path.string() + ":" + std::to_string(line) + ": cannot parse '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

std::string_view to_string(CorrectionMethod m) { return m == CorrectionMethod::subtract ? "subtract" : "divide"; }

std::optional<CorrectionMethod> parse_correction_method(std::string_view s) {
    if (s == "subtract") return CorrectionMethod::subtract;
    if (s == "divide") return CorrectionMethod::divide;
    return std::nullopt;
}

std::pair<double, double> minmax_normalize(const std::vector<double>& values, const std::vector<std::uint8_t>& defined,
                                           std::vector<double>& out) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!defined[i]) continue;
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
    }
    if (!(hi > lo)) {
        throw DegenerateFieldError("min-max normalization of a constant field (all defined values equal " +
                                   format_number(lo) + ")");
    }
    out.assign(values.size(), kNaN);
    const double range = hi - lo;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (defined[i]) out[i] = (values[i] - lo) / range;
    }
    return {lo, hi};
}

CorrectedField correct_subtract(const MetricField& raw, const SurrogateStats& sur) {
    check_shapes(raw, sur);
    CorrectedField cf;
    cf.method = CorrectionMethod::subtract;
    cf.metric = raw.metric;
    cf.raw = raw.values;
    cf.surrogate_mean = sur.mean;
    cf.defined.assign(raw.size(), 0);
    cf.corrected.assign(raw.size(), kNaN);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw.defined[i]) {
            cf.corrected[i] = raw.values[i] - sur.mean[i];
            cf.defined[i] = 1;
        }
    }
    return finish(std::move(cf));
}

CorrectedField correct_divide(const MetricField& raw, const SurrogateStats& sur) {
    check_shapes(raw, sur);
    CorrectedField cf;
    cf.method = CorrectionMethod::divide;
    cf.metric = raw.metric;
    cf.raw = raw.values;
    cf.surrogate_mean = sur.mean;
    cf.defined.assign(raw.size(), 0);
    cf.corrected.assign(raw.size(), kNaN);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw.defined[i] && sur.mean[i] > 0.0) {
            cf.corrected[i] = raw.values[i] / sur.mean[i];
            cf.defined[i] = 1;
        }
    }
    return finish(std::move(cf));
}

CorrectedField apply_correction(CorrectionMethod method, const MetricField& raw, const SurrogateStats& sur) {
    return method == CorrectionMethod::subtract ? correct_subtract(raw, sur) : correct_divide(raw, sur);
}

PairedSample paired_fields(const CorrectedField& sub, const CorrectedField& div, bool normalized) {
    if (sub.size() != div.size()) throw InvalidArgument("corrected fields differ in node count");
    PairedSample out;
    const auto& xs = normalized ? sub.normalized : sub.corrected;
    const auto& ys = normalized ? div.normalized : div.corrected;
    for (std::size_t i = 0; i < sub.size(); ++i) {
        if (!sub.defined[i] || !div.defined[i]) continue;
        out.x.push_back(xs[i]);
        out.y.push_back(ys[i]);
        out.nodes.push_back(i);
    }
    if (out.nodes.empty()) throw InvalidArgument("no node is defined under both corrections");
    return out;
}

void write_corrected_field(const CorrectedField& cf, const GridSpec& grid, const std::filesystem::path& path) {
    if (cf.size() != grid.size()) throw InvalidArgument("corrected field and grid differ in size");
    std::string out = "node_id,lat,lon,raw,surrogate_mean,corrected,normalized,defined\n";
    for (std::size_t i = 0; i < cf.size(); ++i) {
        out += std::to_string(i) + "," + format_number(grid[i].lat) + "," + format_number(grid[i].lon) + "," +
               format_number(cf.raw[i]) + "," + format_number(cf.surrogate_mean[i]) + "," +
               format_number(cf.corrected[i]) + "," + format_number(cf.normalized[i]) + "," +
               (cf.defined[i] ? "1" : "0") + "\n";
    }
    write_file(path, out);
}

CorrectedField read_corrected_field(const std::filesystem::path& path, CorrectionMethod method, Metric metric) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "node_id,lat,lon,raw,surrogate_mean,corrected,normalized,defined") {
        throw FormatError(path.string() + ":1: unexpected header");
    }
    CorrectedField cf;
    cf.method = method;
    cf.metric = metric;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) f.push_back(field);
        if (f.size() != 8) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 8 fields");
        cf.raw.push_back(parse_double(f[3], path, line_no));
        cf.surrogate_mean.push_back(parse_double(f[4], path, line_no));
        cf.corrected.push_back(parse_double(f[5], path, line_no));
        cf.normalized.push_back(parse_double(f[6], path, line_no));
        cf.defined.push_back(f[7] == "1" ? 1 : 0);
        if (!cf.defined.back()) cf.undefined_nodes.push_back(cf.raw.size() - 1);
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < cf.size(); ++i) {
        if (!cf.defined[i]) continue;
        lo = std::min(lo, cf.corrected[i]);
        hi = std::max(hi, cf.corrected[i]);
    }
    cf.norm_min = lo;
    cf.norm_max = hi;
    return cf;
}

}  // namespace gridsync
