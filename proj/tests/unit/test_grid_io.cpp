#include <doctest.h>

#include <cmath>
#include <cstring>

#include "gridsync/calendar.hpp"
#include "gridsync/error.hpp"
#include "gridsync/grid_io.hpp"
#include "gridsync/network.hpp"
#include "../support/tmpdir.hpp"

using namespace gridsync;

namespace {

// Civil date of a day index by walking forward one day at a time from
// 1970-01-01; independent of the library's calendar arithmetic.
struct Civil {
    int y;
    unsigned m, d;
};
Civil civil_walk(std::int32_t day) {
    static const unsigned len[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    Civil c{1970, 1, 1};
    for (std::int32_t k = 0; k < day; ++k) {
        const bool leap = (c.y % 4 == 0 && c.y % 100 != 0) || c.y % 400 == 0;
        const unsigned n = len[c.m - 1] + (c.m == 2 && leap);
        if (++c.d > n) {
            c.d = 1;
            if (++c.m > 12) {
                c.m = 1;
                ++c.y;
            }
        }
    }
    return c;
}

GriddedSeries daily_series(int y0, unsigned m0, unsigned d0, int y1, unsigned m1, unsigned d1, std::size_t nodes = 1) {
    GriddedSeries gs;
    std::vector<GeoPoint> pts;
    for (std::size_t i = 0; i < nodes; ++i) pts.push_back({30.0 + 0.5 * i, -100.0});
    gs.grid = GridSpec(pts);
    for (auto d = day_index(y0, m0, d0); d <= day_index(y1, m1, d1); ++d) gs.days.push_back(d);
    gs.values.resize(nodes * gs.days.size());
    for (std::size_t k = 0; k < gs.values.size(); ++k) gs.values[k] = static_cast<float>(k % 17);
    return gs;
}

std::string cng1(std::uint32_t n_nodes, std::uint32_t n_days, std::size_t day_records, std::size_t value_records) {
    std::string s = "CNG1";
    auto put = [&](auto v) { s.append(reinterpret_cast<const char*>(&v), sizeof v); };
    put(n_nodes);
    put(n_days);
    for (std::uint32_t i = 0; i < n_nodes; ++i) {
        put(10.0 + i);
        put(20.0);
    }
    for (std::size_t k = 0; k < day_records; ++k) put(static_cast<std::int32_t>(k));
    for (std::size_t k = 0; k < value_records; ++k) put(1.5f);
    return s;
}

}  // namespace

TEST_CASE("calendar matches a day-by-day walk") {
    for (std::int32_t d : {0, 59, 365, 789, 7670, 11000, 18262, 18322}) {
        const auto c = civil_walk(d);
        CHECK(day_index(c.y, c.m, c.d) == d);
        CHECK(month_of(d) == c.m);
    }
}

TEST_CASE("CSV fixture with 2 nodes and 3 days round-trips") {
    TempDir dir;
    write_text(dir / "g.csv",
               "node_id,lat,lon,day_index,value\n"
               "0,40.5,-100,7670,1.5\n0,40.5,-100,7671,0\n0,40.5,-100,7672,3\n"
               "1,41,-100,7670,nan\n1,41,-100,7671,2\n1,41,-100,7672,0.25\n");
    const auto gs = load_gridded(dir / "g.csv", GridFormat::csv);
    REQUIRE(gs.n_nodes() == 2);
    REQUIRE(gs.n_days() == 3);
    CHECK(gs.node_values(0)[2] == 3.0f);
    CHECK(std::isnan(gs.node_values(1)[0]));
    write_gridded(gs, dir / "g2.csv", GridFormat::csv);
    const auto again = load_gridded(dir / "g2.csv", GridFormat::csv);
    CHECK(again.grid == gs.grid);
    CHECK(again.days == gs.days);
    CHECK(std::memcmp(again.values.data(), gs.values.data(), gs.values.size() * sizeof(float)) == 0);
}

TEST_CASE("binary round-trip preserves every byte") {
    TempDir dir;
    auto gs = daily_series(1991, 6, 1, 1991, 8, 31, 4);
    gs.values[5] = std::nanf("");
    write_gridded(gs, dir / "g.cng", GridFormat::binary);
    const auto back = load_gridded(dir / "g.cng", GridFormat::binary);
    CHECK(back.grid == gs.grid);
    CHECK(back.days == gs.days);
    CHECK(std::memcmp(back.values.data(), gs.values.data(), gs.values.size() * sizeof(float)) == 0);
}

TEST_CASE("binary truncation is classified by header field") {
    TempDir dir;
    write_text(dir / "short_days.cng", cng1(2, 5, 4, 8));
    CHECK_THROWS_WITH_AS(load_gridded(dir / "short_days.cng", GridFormat::binary),
                         doctest::Contains("day-count mismatch"), FormatError);
    write_text(dir / "bad_magic.cng", "CNG2" + cng1(1, 1, 1, 1).substr(4));
    CHECK_THROWS_WITH_AS(load_gridded(dir / "bad_magic.cng", GridFormat::binary), doctest::Contains("byte offset 0"),
                         FormatError);
    write_text(dir / "odd.cng", cng1(2, 3, 3, 6) + "x");
    CHECK_THROWS_WITH_AS(load_gridded(dir / "odd.cng", GridFormat::binary), doctest::Contains("size mismatch"),
                         FormatError);
}

TEST_CASE("CSV errors carry the line number") {
    TempDir dir;
    write_text(dir / "g.csv", "node_id,lat,lon,day_index,value\n0,40,-100,1,1\n0,40,-100,x,1\n");
    CHECK_THROWS_WITH_AS(load_gridded(dir / "g.csv", GridFormat::csv), doctest::Contains(":3"), FormatError);
    write_text(dir / "h.csv", "id,lat\n");
    CHECK_THROWS_AS(load_gridded(dir / "h.csv", GridFormat::csv), FormatError);
}

TEST_CASE("a 3,276-node grid loads with every node") {
    TempDir dir;
    GriddedSeries gs;
    std::vector<GeoPoint> pts;
    for (int r = 0; r < 52; ++r)
        for (int c = 0; c < 63; ++c) pts.push_back({25.0 + 0.5 * r, -125.0 + 0.5 * c});
    gs.grid = GridSpec(pts);
    gs.days = {day_index(1991, 6, 1), day_index(1991, 6, 2)};
    gs.values.assign(pts.size() * 2, 1.0f);
    write_gridded(gs, dir / "conus.cng", GridFormat::binary);
    CHECK(load_gridded(dir / "conus.cng", GridFormat::binary).n_nodes() == 3276);
}

TEST_CASE("season extraction") {
    SUBCASE("JJA-only input is unchanged") {
        const auto gs = daily_series(1991, 6, 1, 1991, 8, 31, 2);
        const auto s = extract_season(gs, Season::JJA);
        CHECK(s.days == gs.days);
        CHECK(s.values == gs.values);
    }
    SUBCASE("DJF of a full year counts Dec, Jan and Feb by calendar walk") {
        const auto gs = daily_series(1992, 1, 1, 1992, 12, 31);
        std::size_t expected = 0;
        for (auto d : gs.days) {
            const auto m = civil_walk(d).m;
            expected += m == 12 || m == 1 || m == 2;
        }
        const auto s = extract_season(gs, Season::DJF);
        CHECK(s.n_days() == expected);
        CHECK(expected == 31 + 29 + 31);
        for (std::size_t k = 1; k < s.days.size(); ++k) CHECK(s.days[k] > s.days[k - 1]);
    }
    SUBCASE("thirty summers have 2,760 days") {
        const auto gs = daily_series(1991, 1, 1, 2020, 12, 31);
        CHECK(extract_season(gs, Season::JJA).n_days() == 30 * (30 + 31 + 31));
    }
    SUBCASE("values follow their days") {
        const auto gs = daily_series(1991, 5, 30, 1991, 6, 2, 2);
        const auto s = extract_season(gs, Season::JJA);
        REQUIRE(s.n_days() == 2);
        CHECK(s.node_values(1)[0] == gs.node_values(1)[2]);
    }
}

TEST_CASE("metric field round-trip keeps NaN and the undefined flags") {
    TempDir dir;
    const GridSpec grid({{40, -100}, {40.5, -100}, {41, -100.5}});
    MetricField mf(Metric::MGD, 3);
    mf.values = {0.1 + 0.2, std::nan(""), 1e-300};
    mf.defined = {1, 0, 1};
    write_metric_field(mf, grid, dir / "m.csv");
    CHECK(read_file(dir / "m.csv").find("nan") != std::string::npos);
    const auto back = read_metric_field(dir / "m.csv");
    CHECK(back.field.metric == Metric::MGD);
    CHECK(back.field.values[0] == mf.values[0]);
    CHECK(std::isnan(back.field.values[1]));
    CHECK(back.field.values[2] == mf.values[2]);
    CHECK(back.field.defined == mf.defined);
    CHECK(back.grid == grid);
}

TEST_CASE("metric file has one row per node plus a header") {
    TempDir dir;
    std::vector<GeoPoint> pts;
    for (int k = 0; k < 3276; ++k) pts.push_back({25.0 + 0.5 * (k / 63), -125.0 + 0.5 * (k % 63)});
    const GridSpec grid(pts);
    write_metric_field(MetricField(Metric::DC, grid.size()), grid, dir / "dc.csv");
    const auto text = read_file(dir / "dc.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 3277);
}

TEST_CASE("edge list and grid table round-trip") {
    TempDir dir;
    const GridSpec grid({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    const std::vector<Edge> edges{{0, 1}, {3, 1}, {2, 0}};
    const Network net(grid, edges);
    write_grid_nodes(grid, dir / "grid.csv");
    write_edge_list(net, dir / "edges.csv");
    const auto back = read_edge_list(dir / "edges.csv", read_grid_nodes(dir / "grid.csv"));
    CHECK(back.edges() == net.edges());
    CHECK(back.grid() == grid);
}

TEST_CASE("format_number is shortest round-trip") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_number(std::nan("")) == "nan");
}
