#include "gridsync/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include <json.hpp>

#include "gridsync/error.hpp"
#include "gridsync/parallel.hpp"

namespace gridsync {
namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    return h;
}

std::string season_label(const std::string& season) {
    if (season == "JJA") return "Summer (JJA)";
    if (season == "DJF") return "Winter (DJF)";
    return season;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("incomplete beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("incomplete beta needs x in [0, 1]");
    if (x == 0.0 || x == 1.0) return x;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw InvalidArgument("degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return std::clamp(regularized_incomplete_beta(df / 2.0, 0.5, x), 0.0, 1.0);
}

TestResult paired_t_test(std::span<const double> x, std::span<const double> y, double alpha) {
    if (x.size() != y.size()) throw InvalidArgument("paired samples differ in length");
    const std::size_t n = x.size();
    if (n < 2) throw InvalidArgument("paired t-test needs at least 2 pairs");
    TestResult r;
    r.method = "student-t";
    r.n_x = r.n_y = n;
    r.alpha = alpha;

    CompensatedSum sum;
    for (std::size_t i = 0; i < n; ++i) sum.add(x[i] - y[i]);
    const double mean = sum.value() / static_cast<double>(n);
    CompensatedSum ss;
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = (x[i] - y[i]) - mean;
        ss.add(dev * dev);
    }
    const double var = ss.value() / static_cast<double>(n - 1);
    if (!(var > 0.0)) {
        r.degenerate = true;
        r.statistic = 0.0;
        r.p_value = 1.0;
        r.reject = false;
        return r;
    }
    r.statistic = mean / std::sqrt(var / static_cast<double>(n));
    r.p_value = student_t_two_sided_p(r.statistic, static_cast<double>(n - 1));
    r.reject = r.p_value < alpha;
    return r;
}

namespace {

// Largest |i * n_y - j * n_x| over the pooled sample; D = c / (n_x n_y).
std::size_t ks_scaled_statistic(std::span<const double> x, std::span<const double> y) {
    std::vector<double> a(x.begin(), x.end());
    std::vector<double> b(y.begin(), y.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto nx = static_cast<std::int64_t>(a.size());
    const auto ny = static_cast<std::int64_t>(b.size());
    std::int64_t i = 0;
    std::int64_t j = 0;
    std::int64_t best = 0;
    while (i < nx || j < ny) {
        const double v = j >= ny || (i < nx && a[i] <= b[j]) ? a[i] : b[j];
        while (i < nx && a[i] <= v) ++i;
        while (j < ny && b[j] <= v) ++j;
        best = std::max(best, std::abs(i * ny - j * nx));
    }
    return static_cast<std::size_t>(best);
}

void check_ks_inputs(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw InvalidArgument("K-S test needs non-empty samples");
    for (auto s : {x, y}) {
        for (double v : s) {
            if (std::isnan(v)) throw InvalidArgument("K-S test sample contains NaN");
        }
    }
}

}  // namespace

double ks_statistic(std::span<const double> x, std::span<const double> y) {
    check_ks_inputs(x, y);
    return static_cast<double>(ks_scaled_statistic(x, y)) / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

double ks_p_asymptotic(double d, std::size_t n_x, std::size_t n_y) {
    const double ne = static_cast<double>(n_x) * static_cast<double>(n_y) / static_cast<double>(n_x + n_y);
    const double sq = std::sqrt(ne);
    const double lambda = (sq + 0.12 + 0.11 / sq) * d;
    // The alternating series converges too slowly to be useful here, and
    // the tail is 1 to double precision.
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 1000; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_p_exact(std::size_t c, std::size_t n_x, std::size_t n_y) {
    if (c == 0) return 1.0;
    if (n_x > n_y) std::swap(n_x, n_y);
    // Paths from (0,0) to (n_x, n_y) with |i n_y - j n_x| < c everywhere;
    // rows are rescaled when they grow large and the scale tracked in logs.
    const auto cx = static_cast<std::int64_t>(n_x);
    const auto cy = static_cast<std::int64_t>(n_y);
    const auto bound = static_cast<std::int64_t>(c);
    auto inside = [&](std::int64_t i, std::int64_t j) { return std::llabs(i * cy - j * cx) < bound; };
    std::vector<long double> row(n_y + 1, 0.0L);
    row[0] = 1.0L;
    for (std::size_t j = 1; j <= n_y; ++j) {
        row[j] = inside(0, static_cast<std::int64_t>(j)) ? row[j - 1] : 0.0L;
    }
    long double log_scale = 0.0L;
    for (std::size_t i = 1; i <= n_x; ++i) {
        row[0] = inside(static_cast<std::int64_t>(i), 0) ? row[0] : 0.0L;
        for (std::size_t j = 1; j <= n_y; ++j) {
            row[j] = inside(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)) ? row[j] + row[j - 1] : 0.0L;
        }
        long double peak = 0.0L;
        for (auto v : row) peak = std::max(peak, v);
        if (peak > 1e300L) {
            for (auto& v : row) v /= peak;
            log_scale += std::log(peak);
        }
    }
    const long double log_total = std::lgamma(static_cast<long double>(n_x + n_y) + 1) -
                                  std::lgamma(static_cast<long double>(n_x) + 1) -
                                  std::lgamma(static_cast<long double>(n_y) + 1);
    const long double stay = row[n_y] > 0 ? std::exp(std::log(row[n_y]) + log_scale - log_total) : 0.0L;
    return std::clamp(static_cast<double>(1.0L - stay), 0.0, 1.0);
}

TestResult ks_two_sample(std::span<const double> x, std::span<const double> y, double alpha) {
    check_ks_inputs(x, y);
    TestResult r;
    r.n_x = x.size();
    r.n_y = y.size();
    r.alpha = alpha;
    const std::size_t c = ks_scaled_statistic(x, y);
    r.statistic = static_cast<double>(c) / (static_cast<double>(r.n_x) * static_cast<double>(r.n_y));
    if (r.n_x * r.n_y <= kKsExactLimit) {
        r.method = "ks-exact";
        r.p_value = ks_p_exact(c, r.n_x, r.n_y);
    } else {
        r.method = "ks-asymptotic";
        r.p_value = ks_p_asymptotic(r.statistic, r.n_x, r.n_y);
    }
    r.reject = r.p_value < alpha;
    return r;
}

std::string format_p(double p) {
    if (p < 1e-300) return "0.00";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", p);
    return buf;
}

const ComparisonCell* ComparisonReport::find(std::string_view network, std::string_view season, Metric metric) const {
    for (const auto& c : cells) {
        if (c.key.network == network && c.key.season == season && c.key.metric == metric) return &c;
    }
    return nullptr;
}

std::string ComparisonReport::to_json() const {
    using nlohmann::ordered_json;
    ordered_json root = ordered_json::object();
    auto encode = [](const TestResult& t) {
        return ordered_json{{"stat", t.statistic}, {"p", t.p_value}, {"reject", t.reject}};
    };
    for (const auto& c : cells) {
        ordered_json cell{{"paired_t", encode(c.paired_t)}, {"ks", encode(c.ks)}, {"n", c.n}};
        cell["paired_t"]["degenerate"] = c.paired_t.degenerate;
        cell["ks"]["method"] = c.ks.method;
        root[c.key.network][c.key.season][std::string(to_string(c.key.metric))] = cell;
    }
    return root.dump(2) + "\n";
}

std::string ComparisonReport::to_text() const {
    constexpr Metric kColumns[] = {Metric::DC, Metric::CC, Metric::MGD, Metric::BC};
    std::vector<std::pair<std::string, std::string>> blocks;
    for (const auto& c : cells) {
        std::pair<std::string, std::string> b{c.key.network, c.key.season};
        if (std::find(blocks.begin(), blocks.end(), b) == blocks.end()) blocks.push_back(b);
    }
    // Table order: EPE before ETE, summer before winter.
    std::stable_sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second == "JJA" && b.second != "JJA";
    });

    char line[256];
    std::string out;
    std::snprintf(line, sizeof line, "%-18s%-12s%-12s%-12s%-12s\n", "Statistical test", "DC", "CC", "MGD", "BC");
    out += line;
    for (const auto& [network, season] : blocks) {
        out += network + " network-" + season_label(season) + "\n";
        for (int row = 0; row < 2; ++row) {
            std::snprintf(line, sizeof line, "%-18s", row == 0 ? "Paired t-test" : "KS test");
            out += line;
            for (auto m : kColumns) {
                const auto* c = find(network, season, m);
                const std::string cell = c ? format_p(row == 0 ? c->paired_t.p_value : c->ks.p_value) : "n/a";
                std::snprintf(line, sizeof line, "%-12s", cell.c_str());
                out += line;
            }
            out += "\n";
        }
    }
    if (!missing.empty()) {
        out += "Missing cells:\n";
        for (const auto& m : missing) out += "  " + m + "\n";
    }
    return out;
}

ComparisonReport compare_methods(std::span<const ComparisonInput> inputs,
                                 std::span<const std::pair<std::string, std::string>> requested, double alpha) {
    ComparisonReport report;
    report.alpha = alpha;
    std::vector<std::optional<ComparisonCell>> computed(inputs.size());
    std::vector<std::string> failures(inputs.size());
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const auto& in = inputs[k];
        try {
            ComparisonCell cell;
            cell.key = in.key;
            cell.n = in.sample.x.size();
            auto y = in.sample.y;
            for (std::size_t i = 0; i < y.size() && i < in.sample.x.size(); ++i) {
                if (std::fabs(in.sample.x[i] - y[i]) <= kPairTieTolerance) y[i] = in.sample.x[i];
            }
            cell.paired_t = paired_t_test(in.sample.x, y, alpha);
            cell.ks = ks_two_sample(in.sample.x, y, alpha);
            computed[k] = std::move(cell);
        } catch (const Error& e) {
            failures[k] = e.what();
        }
    }
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const auto& key = inputs[k].key;
        if (computed[k]) {
            report.cells.push_back(std::move(*computed[k]));
        } else {
            report.missing.push_back(key.network + "/" + key.season + "/" + std::string(to_string(key.metric)) + ": " +
                                     failures[k]);
        }
    }
    for (const auto& [network, season] : requested) {
        for (auto m : {Metric::DC, Metric::CC, Metric::MGD, Metric::BC}) {
            const bool supplied = std::any_of(inputs.begin(), inputs.end(), [&](const ComparisonInput& in) {
                return in.key.network == network && in.key.season == season && in.key.metric == m;
            });
            if (!supplied) report.missing.push_back(network + "/" + season + "/" + std::string(to_string(m)) + ": not supplied");
        }
    }
    return report;
}

}  // namespace gridsync
