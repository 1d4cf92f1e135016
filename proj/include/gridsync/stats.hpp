#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridsync/correction.hpp"
#include "gridsync/metric_field.hpp"

namespace gridsync {

inline constexpr double kDefaultAlpha = 0.05;

struct TestResult {
    double statistic = 0.0;  // t or D
    double p_value = 1.0;
    std::size_t n_x = 0;
    std::size_t n_y = 0;
    double alpha = kDefaultAlpha;
    bool reject = false;      // p_value < alpha
    bool degenerate = false;  // zero-variance paired differences
    std::string method;       // "student-t", "ks-exact" or "ks-asymptotic"
};

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// Paired t-test on d = x - y. Zero-variance differences give p = 1 and
/// `degenerate`. Throws InvalidArgument for n < 2 or unequal lengths.
TestResult paired_t_test(std::span<const double> x, std::span<const double> y, double alpha = kDefaultAlpha);

/// sup |F_x - F_y| over the pooled sample, ties evaluated jointly.
double ks_statistic(std::span<const double> x, std::span<const double> y);

/// Asymptotic Kolmogorov tail with the effective-size correction
/// lambda = (sqrt(n_e) + 0.12 + 0.11 / sqrt(n_e)) * D.
double ks_p_asymptotic(double d, std::size_t n_x, std::size_t n_y);

/// Exact P(D >= d) under random assignment of a tie-free pooled sample,
/// by counting monotone lattice paths that stay strictly inside the band.
/// `c` is D * n_x * n_y as an integer.
double ks_p_exact(std::size_t c, std::size_t n_x, std::size_t n_y);

/// Samples with n_x * n_y at or below this use the exact distribution.
inline constexpr std::size_t kKsExactLimit = 10000;

TestResult ks_two_sample(std::span<const double> x, std::span<const double> y, double alpha = kDefaultAlpha);

/// "0.00" below 1e-300, otherwise three significant figures ("8.23e-03").
std::string format_p(double p);

struct CellKey {
    std::string network;  // EPE / ETE
    std::string season;   // JJA / DJF
    Metric metric = Metric::DC;
};

struct ComparisonInput {
    CellKey key;
    PairedSample sample;
};

struct ComparisonCell {
    CellKey key;
    std::size_t n = 0;
    TestResult paired_t;
    TestResult ks;
};

struct ComparisonReport {
    double alpha = kDefaultAlpha;
    std::vector<ComparisonCell> cells;
    std::vector<std::string> missing;  // "EPE/JJA/BC: reason"

    const ComparisonCell* find(std::string_view network, std::string_view season, Metric metric) const;
    /// {network: {season: {metric: {paired_t: {stat, p, reject}, ks: {...}}}}}
    std::string to_json() const;
    /// Network-season blocks with paired-t and K-S rows, DC/CC/MGD/BC columns.
    std::string to_text() const;
};

/// Paired values closer than this are compared as equal; corrected fields
/// that agree up to rounding would otherwise look different to both tests.
inline constexpr double kPairTieTolerance = 1e-12;

/// One cell per input; every (network, season) pair in `requested` must
/// cover all four metrics, otherwise the gaps are listed in `missing`.
ComparisonReport compare_methods(std::span<const ComparisonInput> inputs,
                                 std::span<const std::pair<std::string, std::string>> requested = {},
                                 double alpha = kDefaultAlpha);

}  // namespace gridsync
