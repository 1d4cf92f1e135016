#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gridsync/correction.hpp"
#include "gridsync/netmetrics.hpp"
#include "gridsync/pipeline.hpp"
#include "gridsync/stats.hpp"
#include "gridsync/surrogate.hpp"
#include "gridsync/sync.hpp"
#include "gridsync/synth.hpp"

namespace py = pybind11;
using namespace gridsync;

namespace {

GridSpec make_grid(const std::vector<std::pair<double, double>>& coords) {
    std::vector<GeoPoint> pts;
    pts.reserve(coords.size());
    for (const auto& [lat, lon] : coords) pts.push_back({lat, lon});
    return GridSpec(std::move(pts));
}

Network make_network(const std::vector<std::pair<double, double>>& coords, const std::vector<Edge>& edges) {
    return Network(make_grid(coords), edges);
}

MetricField field_from(Metric m, const std::vector<double>& values, std::optional<std::vector<std::uint8_t>> defined) {
    MetricField mf(m, values.size());
    mf.values = values;
    if (defined) mf.defined = *defined;
    return mf;
}

py::dict test_dict(const TestResult& r) {
    py::dict d;
    d["statistic"] = r.statistic;
    d["p_value"] = r.p_value;
    d["reject"] = r.reject;
    d["degenerate"] = r.degenerate;
    d["method"] = r.method;
    return d;
}

py::dict corrected_dict(const CorrectedField& cf) {
    py::dict d;
    d["corrected"] = cf.corrected;
    d["normalized"] = cf.normalized;
    d["defined"] = cf.defined;
    d["undefined_nodes"] = cf.undefined_nodes;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Event-synchronization climate networks with surrogate boundary corrections";
    m.attr("__version__") = std::string(cli::kVersion);

    py::register_exception<Error>(m, "GridsyncError", PyExc_RuntimeError);
    py::enum_<Metric>(m, "Metric")
        .value("DC", Metric::DC)
        .value("CC", Metric::CC)
        .value("MGD", Metric::MGD)
        .value("BC", Metric::BC);

    m.def(
        "event_sync",
        [](const std::vector<std::int32_t>& ei, const std::vector<std::int32_t>& ej, int tau_max) {
            return event_sync(ei, ej, tau_max);
        },
        py::arg("ei"), py::arg("ej"), py::arg("tau_max") = 0);
    m.def("null_threshold_exact", &null_threshold_exact, py::arg("T"), py::arg("n_i"), py::arg("n_j"),
          py::arg("q") = 0.995);
    m.def(
        "dedup_consecutive",
        [](std::vector<std::int32_t> days) {
            EventSeries es;
            es.event_days = std::move(days);
            return dedup_consecutive(es).event_days;
        },
        py::arg("days"));

    m.def(
        "build_network",
        [](const std::vector<std::vector<std::int32_t>>& events, const std::vector<std::int32_t>& season_days,
           const std::vector<std::pair<double, double>>& coords, std::uint64_t seed, int n_shuffles, double quantile,
           unsigned threads) {
            auto days = std::make_shared<const std::vector<std::int32_t>>(season_days);
            std::vector<EventSeries> series(events.size());
            for (std::size_t i = 0; i < events.size(); ++i) series[i] = {i, events[i], days};
            SyncParams p;
            p.seed = seed;
            p.n_shuffles = n_shuffles;
            p.link_quantile = quantile;
            py::gil_scoped_release release;
            return build_network(series, make_grid(coords), p, threads).edges();
        },
        py::arg("events"), py::arg("season_days"), py::arg("coords"), py::arg("seed"), py::arg("n_shuffles") = 1000,
        py::arg("quantile") = 0.995, py::arg("threads") = 0);

    m.def(
        "metric",
        [](Metric which, const std::vector<std::pair<double, double>>& coords, const std::vector<Edge>& edges,
           unsigned threads) {
            const auto mf = compute_metric(which, make_network(coords, edges), threads);
            return py::make_tuple(mf.values, mf.defined);
        },
        py::arg("metric"), py::arg("coords"), py::arg("edges"), py::arg("threads") = 0);

    m.def("haversine_km", [](double lat1, double lon1, double lat2, double lon2) {
        return haversine_km({lat1, lon1}, {lat2, lon2});
    });

    m.def(
        "surrogate_mean",
        [](Metric which, const std::vector<std::pair<double, double>>& coords, const std::vector<Edge>& edges,
           std::size_t ensemble_size, std::uint64_t seed, double bin_width_km, unsigned threads) {
            const auto net = make_network(coords, edges);
            const auto profile = estimate_profile(net, bin_width_km);
            const Metric ms[] = {which};
            py::gil_scoped_release release;
            return ensemble_stats(profile, net.grid(), ms, ensemble_size, seed, threads)[0].mean;
        },
        py::arg("metric"), py::arg("coords"), py::arg("edges"), py::arg("ensemble_size") = 1000, py::arg("seed") = 0,
        py::arg("bin_width_km") = 50.0, py::arg("threads") = 0);

    m.def(
        "correct",
        [](const std::string& method, Metric which, const std::vector<double>& raw, const std::vector<double>& mean,
           std::optional<std::vector<std::uint8_t>> defined) {
            const auto parsed = parse_correction_method(method);
            if (!parsed) throw InvalidArgument("method must be subtract or divide");
            SurrogateStats s;
            s.metric = which;
            s.mean = mean;
            return corrected_dict(apply_correction(*parsed, field_from(which, raw, defined), s));
        },
        py::arg("method"), py::arg("metric"), py::arg("raw"), py::arg("surrogate_mean"), py::arg("defined") = py::none());

    m.def(
        "paired_t_test",
        [](const std::vector<double>& x, const std::vector<double>& y, double alpha) {
            return test_dict(paired_t_test(x, y, alpha));
        },
        py::arg("x"), py::arg("y"), py::arg("alpha") = kDefaultAlpha);
    m.def(
        "ks_two_sample",
        [](const std::vector<double>& x, const std::vector<double>& y, double alpha) {
            return test_dict(ks_two_sample(x, y, alpha));
        },
        py::arg("x"), py::arg("y"), py::arg("alpha") = kDefaultAlpha);

    m.def(
        "run",
        [](const std::string& command, const std::filesystem::path& config, std::optional<std::uint64_t> seed,
           std::optional<unsigned> threads, std::optional<std::filesystem::path> out) {
            cli::Overrides ov{seed, threads, out};
            const auto cfg = cli::load_config(config, ov);
            py::gil_scoped_release release;
            cli::run_stage(command, cfg);
        },
        py::arg("command"), py::arg("config"), py::arg("seed") = py::none(), py::arg("threads") = py::none(),
        py::arg("out") = py::none(),
        "Run one CLI stage (or 'pipeline'); raises on invalid config or failure.");
}
