// Acceptance gates. Prints one PASS/FAIL line per criterion and exits
// non-zero when any gating criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>
#include <unistd.h>

#include "gridsync/correction.hpp"
#include "gridsync/grid_io.hpp"
#include "gridsync/netmetrics.hpp"
#include "gridsync/parallel.hpp"
#include "gridsync/random.hpp"
#include "gridsync/stats.hpp"
#include "gridsync/surrogate.hpp"
#include "gridsync/sync.hpp"
#include "gridsync/synth.hpp"
#include "../support/oracles.hpp"

using namespace gridsync;
namespace fs = std::filesystem;

namespace {

// ---- pinned tolerances and budgets ----------------------------------------
constexpr double kBudget1 = 5.0;
constexpr double kBudget2 = 60.0;
constexpr double kBudget3 = 120.0;
constexpr double kBudget4 = 60.0;
constexpr double kBudget5 = 300.0;
constexpr double kBudget6 = 300.0;
constexpr double kBudget7 = 180.0;

constexpr int kPairs1 = 1000;
constexpr std::size_t kT = 2760;
constexpr std::size_t kN2 = 138;
constexpr int kTrials2 = 100;
constexpr int kNeed2 = 95;
constexpr std::int64_t kSlack2 = 1;
constexpr int kEnumMaxT = 12;
constexpr int kGraphs3 = 100;
constexpr double kBcTol = 1e-9;
constexpr double kMgdRelTol = 1e-9;
constexpr int kTFixtures4 = 20;
constexpr double kTTol = 1e-9;
constexpr double kKsPTol = 0.02;
constexpr int kInvariance4 = 100;
constexpr int kSeeds5 = 50;
constexpr int kNeed5 = 45;
constexpr std::size_t kEnsemble5 = 200;
constexpr double kBoundaryRatio5 = 0.9;
constexpr double kGapShrink5 = 0.5;
constexpr double kAlpha = 0.05;
constexpr double kCoincide6 = 1e-12;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

SeasonDays universe(std::size_t T) {
    auto v = std::make_shared<std::vector<std::int32_t>>();
    for (std::size_t k = 0; k < T; ++k) v->push_back(static_cast<std::int32_t>(k));
    return v;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 1 -------------------------------------------------------------------------
Outcome es_intersection() {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> rate(0.01, 0.10);
    int agree = 0;
    for (int p = 0; p < kPairs1; ++p) {
        std::vector<std::int32_t> s[2];
        for (auto& v : s) {
            std::bernoulli_distribution fire(rate(rng));
            for (std::size_t d = 0; d < kT; ++d)
                if (fire(rng)) v.push_back(static_cast<std::int32_t>(d));
            EventSeries es;
            es.event_days = v;
            v = dedup_consecutive(es).event_days;
        }
        agree += event_sync(s[0], s[1], 0) == static_cast<std::int64_t>(oracle::intersection_size(s[0], s[1]));
    }
    return {agree == kPairs1, fmt("%d/%d pairs equal", agree, kPairs1)};
}

// 2 -------------------------------------------------------------------------
Outcome null_model() {
    const auto u = universe(kT);
    const auto exact = null_threshold_exact(kT, kN2, kN2, 0.995);
    SyncParams params;  // 1000 shuffles, q = 0.995
    int close = 0;
    for (int t = 0; t < kTrials2; ++t) {
        const double mc = null_threshold_counts(*u, kN2, kN2, params, derive_seed(77, static_cast<std::uint64_t>(t)));
        close += std::fabs(mc - static_cast<double>(exact)) <= static_cast<double>(kSlack2);
    }
    int enum_ok = 0, enum_total = 0;
    for (int T = 1; T <= kEnumMaxT; ++T)
        for (int ni = 0; ni <= T; ++ni)
            for (int nj = 0; nj <= T; ++nj)
                for (double q : {0.5, 0.9, 0.95, 0.995, 1.0}) {
                    ++enum_total;
                    enum_ok += null_threshold_exact(T, ni, nj, q) == oracle::enumerate_overlap_quantile(T, ni, nj, q);
                }
    return {close >= kNeed2 && enum_ok == enum_total,
            fmt("exact q=%lld; %d/%d trials within +-%lld; enumeration %d/%d", static_cast<long long>(exact), close,
                kTrials2, static_cast<long long>(kSlack2), enum_ok, enum_total)};
}

// 3 -------------------------------------------------------------------------
Outcome graph_metrics() {
    std::mt19937_64 rng(3003);
    std::uniform_int_distribution<std::size_t> size(3, 40);
    std::uniform_real_distribution<double> density(0.05, 0.5);
    int ok = 0;
    double worst_bc = 0, worst_mgd = 0;
    for (int g = 0; g < kGraphs3; ++g) {
        const auto net = oracle::random_graph(rng, size(rng), density(rng));
        const auto a = oracle::adjacency(net);
        bool good = degree(net).values == oracle::degree(a) && clustering(net).values == oracle::clustering(a);
        const auto bc = betweenness(net, 1).values;
        const auto bc_ref = oracle::betweenness(a);
        const auto mgd = mean_geo_distance(net).values;
        const auto mgd_ref = oracle::mean_distance(a, net.grid());
        for (std::size_t i = 0; i < net.size(); ++i) {
            const double e_bc = std::fabs(bc[i] - bc_ref[i]);
            const double e_mgd = mgd_ref[i] == 0 ? std::fabs(mgd[i]) : std::fabs(mgd[i] - mgd_ref[i]) / mgd_ref[i];
            worst_bc = std::max(worst_bc, e_bc);
            worst_mgd = std::max(worst_mgd, e_mgd);
            good = good && e_bc <= kBcTol && e_mgd <= kMgdRelTol;
        }
        ok += good;
    }
    return {ok == kGraphs3, fmt("%d/%d graphs; max |dBC| %.1e, max rel dMGD %.1e", ok, kGraphs3, worst_bc, worst_mgd)};
}

// 4 -------------------------------------------------------------------------
Outcome statistics() {
    std::mt19937_64 rng(4004);
    std::normal_distribution<double> g(0, 1);
    std::uniform_real_distribution<double> unif(0, 1);

    double worst_t = 0;
    for (int f = 0; f < kTFixtures4; ++f) {
        const std::size_t n = 5 + 3 * static_cast<std::size_t>(f);
        const double shift = 0.05 * f;
        std::vector<double> x(n), y(n);
        for (std::size_t k = 0; k < n; ++k) {
            x[k] = g(rng);
            y[k] = x[k] + shift + 0.8 * g(rng);
        }
        const auto r = paired_t_test(x, y);
        worst_t = std::max(worst_t, std::fabs(r.p_value - oracle::t_two_sided_quadrature(r.statistic, double(n - 1))));
    }

    bool d_exact = true;
    double worst_ks = 0;
    for (std::size_t n = 1; n <= 8; ++n) {
        for (int f = 0; f < 6; ++f) {
            std::vector<double> x(n), y(n);
            for (auto& v : x) v = unif(rng);
            for (auto& v : y) v = unif(rng) + 0.15 * f;
            const auto r = ks_two_sample(x, y);
            d_exact = d_exact && r.statistic == oracle::ks_d(x, y);
            worst_ks = std::max(worst_ks, std::fabs(r.p_value - oracle::ks_permutation_p(x, y)));
        }
    }

    int invariant = 0;
    for (int f = 0; f < kInvariance4; ++f) {
        std::uniform_int_distribution<std::size_t> len(5, 120);
        std::vector<double> x(len(rng)), y(len(rng));
        for (auto& v : x) v = g(rng);
        for (auto& v : y) v = 0.3 * g(rng) + 0.2;
        const auto xy = ks_two_sample(x, y);
        const auto yx = ks_two_sample(y, x);
        auto px = x, py = y;
        std::shuffle(px.begin(), px.end(), rng);
        std::shuffle(py.begin(), py.end(), rng);
        const auto perm = ks_two_sample(px, py);
        auto tx = x, ty = y;
        for (auto& v : tx) v = std::atan(v) * 3 + v * v * v;
        for (auto& v : ty) v = std::atan(v) * 3 + v * v * v;
        const double dt = ks_statistic(tx, ty);
        // paired-t symmetry: swapping arguments flips t, keeps p
        std::vector<double> a(x.begin(), x.begin() + std::min(x.size(), y.size()));
        std::vector<double> b(y.begin(), y.begin() + a.size());
        const auto ab = paired_t_test(a, b), ba = paired_t_test(b, a);
        invariant += xy.statistic == yx.statistic && xy.p_value == yx.p_value && perm.statistic == xy.statistic &&
                     perm.p_value == xy.p_value && dt == xy.statistic && ab.statistic == -ba.statistic &&
                     ab.p_value == ba.p_value;
    }
    const bool pass = worst_t <= kTTol && d_exact && worst_ks <= kKsPTol && invariant == kInvariance4;
    return {pass, fmt("max |dp_t| %.1e; D exact %s; max |dp_ks| %.1e (n<=8); invariances %d/%d", worst_t,
                      d_exact ? "yes" : "no", worst_ks, invariant, kInvariance4)};
}

// 5 -------------------------------------------------------------------------
struct Split {
    double boundary = 0, interior = 0;
};
Split split_means(const std::vector<double>& v, std::size_t side) {
    Split s;
    std::size_t nb = 0, ni = 0;
    for (std::size_t r = 0; r < side; ++r)
        for (std::size_t c = 0; c < side; ++c) {
            const bool edge = r == 0 || c == 0 || r + 1 == side || c + 1 == side;
            (edge ? s.boundary : s.interior) += v[r * side + c];
            ++(edge ? nb : ni);
        }
    s.boundary /= nb;
    s.interior /= ni;
    return s;
}

Outcome boundary_bias(unsigned threads) {
    constexpr std::size_t side = 30;
    const synth::RectLattice lattice{side, side, 50.0, 0.0, 0.0};
    const auto grid = synth::lattice_grid(lattice);
    const Metric dc_only[] = {Metric::DC};
    int ok = 0;
    double ratio_sum = 0, shrink_sum = 0;
    for (int s = 0; s < kSeeds5; ++s) {
        const auto net = synth::gen_embedded_network({lattice, synth::Exponential{0.8, 100.0}, 5000u + s});
        const auto raw = degree(net);
        const auto raw_split = split_means(raw.values, side);
        const double ratio = raw_split.boundary / raw_split.interior;

        std::vector<double> raw_norm;
        minmax_normalize(raw.values, raw.defined, raw_norm);
        const auto rn = split_means(raw_norm, side);
        const double gap_raw = std::fabs(rn.boundary - rn.interior);

        const auto profile = estimate_profile(net, 50.0);
        const auto stats = ensemble_stats(profile, grid, dc_only, kEnsemble5, derive_seed(6000, s), threads);
        const auto corrected = correct_subtract(raw, stats[0]);
        const auto cn = split_means(corrected.normalized, side);
        const double gap_corr = std::fabs(cn.boundary - cn.interior);

        ratio_sum += ratio;
        shrink_sum += 1 - gap_corr / gap_raw;
        ok += ratio < kBoundaryRatio5 && gap_corr <= (1 - kGapShrink5) * gap_raw;
    }
    return {ok >= kNeed5, fmt("%d/%d seeds; mean boundary/interior DC %.3f; mean gap reduction %.0f%%", ok, kSeeds5,
                              ratio_sum / kSeeds5, 100 * shrink_sum / kSeeds5)};
}

// 6 -------------------------------------------------------------------------
Outcome method_divergence(unsigned threads) {
    // A 20x20 core of 50 km cells plus two kinds of outlying vertex: six far
    // enough that no positive-probability bin reaches them (zero surrogate
    // degree), and eight near-isolated ones, several hundred km out, each with
    // one long link to the core, whose surrogate degree is small but positive.
    const auto core = synth::lattice_grid({20, 20, 50.0, 0.0, 0.0});
    std::vector<GeoPoint> pts(core.nodes().begin(), core.nodes().end());
    const double pi = std::acos(-1.0);
    for (int k = 0; k < 8; ++k) pts.push_back({10.0 * std::sin(k * pi / 4), 10.0 * std::cos(k * pi / 4)});
    for (int k = 0; k < 6; ++k) pts.push_back({-40.0 + 15.0 * k, 120.0});
    const GridSpec grid(pts);
    const auto base = synth::gen_embedded_network({grid, synth::Exponential{0.8, 100.0}, 66});
    auto edges = base.edges();
    for (std::uint32_t o = 400; o < 408; ++o) {
        std::uint32_t nearest = 0;
        for (std::uint32_t c = 1; c < 400; ++c)
            if (haversine_km(grid[o], grid[c]) < haversine_km(grid[o], grid[nearest])) nearest = c;
        edges.emplace_back(nearest, o);
    }
    const Network net(grid, edges);
    const auto raw = degree(net);
    const auto profile = estimate_profile(net, 50.0);
    const Metric dc_only[] = {Metric::DC};
    const auto stats = ensemble_stats(profile, grid, dc_only, 1000, 6007, threads)[0];

    const auto sub = correct_subtract(raw, stats);
    const auto div = correct_divide(raw, stats);
    const std::vector<ComparisonInput> in{{{"SYN", "JJA", Metric::DC}, paired_fields(sub, div)}};
    const auto rep = compare_methods(in, {}, kAlpha);
    const auto& cell = rep.cells.at(0);

    // control: constant positive surrogate means
    SurrogateStats flat = stats;
    std::fill(flat.mean.begin(), flat.mean.end(), 3.7);
    flat.zero_mean_nodes.clear();
    const auto csub = correct_subtract(raw, flat);
    const auto cdiv = correct_divide(raw, flat);
    double worst = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) worst = std::max(worst, std::fabs(csub.normalized[i] - cdiv.normalized[i]));
    const std::vector<ComparisonInput> cin{{{"CTL", "JJA", Metric::DC}, paired_fields(csub, cdiv)}};
    const auto crep = compare_methods(cin, {}, kAlpha);
    const auto& ccell = crep.cells.at(0);

    const bool divergent = !stats.zero_mean_nodes.empty() && cell.paired_t.p_value < kAlpha && cell.ks.p_value < kAlpha;
    const bool control = worst <= kCoincide6 && !ccell.paired_t.reject && !ccell.ks.reject;
    return {divergent && control,
            fmt("%zu zero-mean nodes; t p=%s, KS p=%s; control max diff %.1e, t p=%s, KS p=%s",
                stats.zero_mean_nodes.size(), format_p(cell.paired_t.p_value).c_str(),
                format_p(cell.ks.p_value).c_str(), worst, format_p(ccell.paired_t.p_value).c_str(),
                format_p(ccell.ks.p_value).c_str())};
}

// 7 -------------------------------------------------------------------------
std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
    return out;
}

int run_cli(const fs::path& cli, const std::string& args) {
    const std::string cmd = "\"" + cli.string() + "\" " + args + " 2>/dev/null";
    return std::system(cmd.c_str());
}

Outcome determinism(const fs::path& fixture, const fs::path& cli) {
    if (cli.empty() || !fs::exists(cli)) return {false, "CLI binary not found"};
    const fs::path work = fs::temp_directory_path() / fmt("gridsync_accept_%d", static_cast<int>(::getpid()));
    fs::remove_all(work);
    fs::create_directories(work);
    const auto config = (fixture / "pipeline.json").string();
    const unsigned max_threads = default_thread_count();
    std::vector<std::pair<std::string, unsigned>> runs{
        {"t1", 1}, {"t4", 4}, {"tmax", max_threads}, {"tmax_again", max_threads}};
    std::map<std::string, std::string> reference;
    std::string detail;
    bool same = true;
    for (const auto& [name, threads] : runs) {
        const auto out = work / name;
        const int rc = run_cli(cli, "pipeline --config \"" + config + "\" --threads " + std::to_string(threads) +
                                        " --out \"" + out.string() + "\"");
        if (rc != 0) {
            fs::remove_all(work);
            return {false, "pipeline failed in run " + name};
        }
        const auto snap = snapshot(out);
        if (reference.empty()) {
            reference = snap;
        } else if (snap != reference) {
            same = false;
            for (const auto& [file, bytes] : snap)
                if (!reference.count(file) || reference.at(file) != bytes) detail += " " + name + ":" + file;
        }
    }
    fs::remove_all(work);
    return {same, fmt("%zu artifacts identical across threads {1, 4, %u} and a rerun", reference.size(), max_threads) +
                      detail};
}

// 8 -------------------------------------------------------------------------
Outcome cpc_integration(const fs::path& cli, const fs::path& config) {
    const fs::path out = fs::temp_directory_path() / "gridsync_cpc_run";
    if (run_cli(cli, "pipeline --config \"" + config.string() + "\" --out \"" + out.string() + "\"") != 0)
        return {false, "pipeline failed"};
    const auto report = nlohmann::json::parse(read_file(out / "report.json"));
    int rejected = 0;
    for (const char* m : {"DC", "CC", "MGD", "BC"}) {
        const auto& cell = report["EPE"]["JJA"][m];
        rejected += cell["paired_t"]["reject"].get<bool>() && cell["ks"]["reject"].get<bool>();
    }
    return {rejected == 4, fmt("%d/4 metrics rejected by both tests", rejected)};
}

}  // namespace

int main(int argc, char** argv) {
    fs::path fixture, cli, cpc_config;
    std::vector<int> only;
    unsigned threads = 0;
    for (int k = 1; k < argc; ++k) {
        const std::string a = argv[k];
        auto value = [&]() -> std::string {
            if (k + 1 >= argc) {
                std::cerr << a << " needs a value\n";
                std::exit(2);
            }
            return argv[++k];
        };
        if (a == "--fixture") fixture = value();
        else if (a == "--cli") cli = value();
        else if (a == "--cpc-config") cpc_config = value();
        else if (a == "--only") only.push_back(std::stoi(value()));
        else if (a == "--threads") threads = static_cast<unsigned>(std::stoul(value()));
        else {
            std::cerr << "unknown argument " << a << "\n";
            return 2;
        }
    }
    if (cpc_config.empty())
        if (const char* env = std::getenv("GRIDSYNC_CPC_CONFIG")) cpc_config = env;

    struct Criterion {
        int id;
        const char* name;
        double budget;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "ES equals set intersection at zero lag", kBudget1, es_intersection},
        {2, "null threshold vs hypergeometric quantile", kBudget2, null_model},
        {3, "graph metrics vs brute-force oracles", kBudget3, graph_metrics},
        {4, "paired-t and K-S oracles and invariances", kBudget4, statistics},
        {5, "boundary bias reduced by subtraction", kBudget5, [&] { return boundary_bias(threads); }},
        {6, "subtraction and division diverge; control agrees", kBudget6, [&] { return method_divergence(threads); }},
        {7, "pipeline artifacts are byte-identical", kBudget7, [&] { return determinism(fixture, cli); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double took = seconds_since(t0);
        const bool pass = o.pass && took < c.budget;
        failed += !pass;
        std::printf("[%s] %d %s: %s (%.1f s, budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), took, c.budget);
        std::fflush(stdout);
    }

    if (only.empty() || std::find(only.begin(), only.end(), 8) != only.end()) {
        if (cpc_config.empty()) {
            std::printf("[SKIP] 8 CPC end-to-end run (optional): no --cpc-config or GRIDSYNC_CPC_CONFIG given\n");
        } else {
            const auto t0 = Clock::now();
            Outcome o;
            try {
                o = cpc_integration(cli, cpc_config);
            } catch (const std::exception& e) {
                o = {false, std::string("exception: ") + e.what()};
            }
            std::printf("[%s] 8 CPC end-to-end run (optional, not gating): %s (%.1f s)\n", o.pass ? "PASS" : "FAIL",
                        o.detail.c_str(), seconds_since(t0));
        }
    }
    return failed == 0 ? 0 : 1;
}
