#include "gridsync/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gridsync/error.hpp"

namespace gridsync {
namespace {

using json = nlohmann::json;

constexpr char kMagic[4] = {'C', 'N', 'G', '1'};

template <typename T>
T byteswap_if_big(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        std::reverse(b, b + sizeof(T));
        std::memcpy(&v, b, sizeof(T));
        return v;
    }
}

class ByteReader {
public:
    explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

    template <typename T>
    T get(const char* what) {
        if (pos_ + sizeof(T) > bytes_.size()) {
            throw FormatError(std::string("truncated file at byte offset ") + std::to_string(pos_) +
                              " while reading " + what);
        }
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return byteswap_if_big(v);
    }
    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

template <typename T>
void put(std::string& out, T v) {
    v = byteswap_if_big(v);
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out.append(b, sizeof(T));
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

/// Line-oriented CSV reader with 1-based line numbers in errors.
class CsvReader {
public:
    CsvReader(const std::filesystem::path& path, std::string_view expected_header)
        : text_(read_file(path)), path_(path.string()) {
        std::string_view header;
        if (!next_line(header) || header != expected_header) {
            fail("expected header '" + std::string(expected_header) + "'");
        }
    }

    bool next(std::vector<std::string_view>& fields) {
        std::string_view line;
        while (next_line(line)) {
            if (line.empty()) continue;
            fields = split_csv(line);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw FormatError(path_ + ":" + std::to_string(line_no_) + ": " + what);
    }

    template <typename T>
    T parse(std::string_view field, const char* what) const {
        T v{};
        if (field == "nan" || field == "NaN") {
            if constexpr (std::is_floating_point_v<T>) return std::numeric_limits<T>::quiet_NaN();
        }
        const auto* end = field.data() + field.size();
        const auto [ptr, ec] = std::from_chars(field.data(), end, v);
        if (ec != std::errc{} || ptr != end) fail(std::string("cannot parse ") + what + " '" + std::string(field) + "'");
        return v;
    }

    std::size_t line_no() const { return line_no_; }

private:
    bool next_line(std::string_view& line) {
        if (pos_ >= text_.size()) return false;
        auto nl = text_.find('\n', pos_);
        if (nl == std::string::npos) nl = text_.size();
        line = std::string_view(text_).substr(pos_, nl - pos_);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos_ = nl + 1;
        ++line_no_;
        return true;
    }

    std::string text_;
    std::string path_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

json read_json(const std::filesystem::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::filesystem::path sidecar(const std::filesystem::path& path) {
    auto p = path;
    p += ".json";
    return p;
}

GriddedSeries load_binary(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    ByteReader in(bytes);
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError(path.string() + ": bad magic at byte offset 0 (expected CNG1)");
    }
    in.get<std::uint32_t>("magic");
    const auto n_nodes = in.get<std::uint32_t>("n_nodes");
    const auto n_days = in.get<std::uint32_t>("n_days");

    const std::size_t expected = 12 + std::size_t{n_nodes} * 16 + std::size_t{n_days} * 4 +
                                 std::size_t{n_nodes} * n_days * 4;
    if (bytes.size() != expected) {
        // Name the header field the actual size is consistent with, if any.
        std::string what = "size mismatch";
        const std::size_t body = bytes.size() >= 12 ? bytes.size() - 12 : 0;
        const std::size_t n = n_nodes;
        const std::size_t d = n_days;
        if (body >= 16 * n && (body - 16 * n) % (4 * (1 + n)) == 0) {
            what = "day-count mismatch";
        } else if (body >= 4 * d && (body - 4 * d) % (16 + 4 * d) == 0) {
            what = "node-count mismatch";
        }
        throw FormatError(path.string() + ": " + what + ": header declares " + std::to_string(n_nodes) +
                          " nodes x " + std::to_string(n_days) + " days (" + std::to_string(expected) +
                          " bytes) but file has " + std::to_string(bytes.size()) + " bytes");
    }

    std::vector<GeoPoint> nodes(n_nodes);
    for (auto& p : nodes) {
        const std::size_t at = in.offset();
        p.lat = in.get<double>("lat");
        p.lon = in.get<double>("lon");
        if (!(p.lat >= -90 && p.lat <= 90) || !(p.lon >= -180 && p.lon <= 180)) {
            throw FormatError(path.string() + ": coordinates out of range at byte offset " + std::to_string(at));
        }
    }
    GriddedSeries gs;
    try {
        gs.grid = GridSpec(std::move(nodes));
    } catch (const InvalidArgument& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    gs.days.resize(n_days);
    for (std::size_t k = 0; k < n_days; ++k) {
        const std::size_t at = in.offset();
        gs.days[k] = in.get<std::int32_t>("day index");
        if (k > 0 && gs.days[k] <= gs.days[k - 1]) {
            throw FormatError(path.string() + ": non-monotone day index at byte offset " + std::to_string(at));
        }
    }
    gs.values.resize(std::size_t{n_nodes} * n_days);
    for (auto& v : gs.values) v = in.get<float>("value");
    return gs;
}

void write_binary(const GriddedSeries& gs, const std::filesystem::path& path) {
    std::string out;
    out.reserve(12 + gs.n_nodes() * 16 + gs.n_days() * 4 + gs.values.size() * 4);
    out.append(kMagic, 4);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(gs.n_nodes()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(gs.n_days()));
    for (const auto& p : gs.grid.nodes()) {
        put<double>(out, p.lat);
        put<double>(out, p.lon);
    }
    for (auto d : gs.days) put<std::int32_t>(out, d);
    for (auto v : gs.values) put<float>(out, v);
    write_file(path, out);
}

GriddedSeries load_csv(const std::filesystem::path& path) {
    CsvReader csv(path, "node_id,lat,lon,day_index,value");
    struct Row {
        std::size_t node;
        std::int32_t day;
        float value;
        std::size_t line;
    };
    std::vector<Row> rows;
    std::map<std::size_t, GeoPoint> coords;
    std::set<std::int32_t> day_set;
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        if (f.size() != 5) csv.fail("expected 5 fields, found " + std::to_string(f.size()));
        const auto node = csv.parse<std::size_t>(f[0], "node_id");
        const GeoPoint p{csv.parse<double>(f[1], "lat"), csv.parse<double>(f[2], "lon")};
        if (!(p.lat >= -90 && p.lat <= 90) || !(p.lon >= -180 && p.lon <= 180)) csv.fail("coordinates out of range");
        const auto day = csv.parse<std::int32_t>(f[3], "day_index");
        const auto value = static_cast<float>(csv.parse<double>(f[4], "value"));
        auto [it, inserted] = coords.emplace(node, p);
        if (!inserted && !(it->second == p)) csv.fail("node " + std::to_string(node) + " changes coordinates");
        day_set.insert(day);
        rows.push_back({node, day, value, csv.line_no()});
    }
    const std::size_t n_nodes = coords.size();
    if (n_nodes > 0 && coords.rbegin()->first != n_nodes - 1) {
        throw FormatError(path.string() + ": node ids are not contiguous from 0");
    }
    GriddedSeries gs;
    std::vector<GeoPoint> nodes;
    nodes.reserve(n_nodes);
    for (const auto& [id, p] : coords) nodes.push_back(p);
    try {
        gs.grid = GridSpec(std::move(nodes));
    } catch (const InvalidArgument& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    gs.days.assign(day_set.begin(), day_set.end());
    if (rows.size() != n_nodes * gs.days.size()) {
        throw FormatError(path.string() + ": row-count mismatch: " + std::to_string(rows.size()) + " rows for " +
                          std::to_string(n_nodes) + " nodes x " + std::to_string(gs.days.size()) + " days");
    }
    gs.values.assign(rows.size(), std::numeric_limits<float>::quiet_NaN());
    std::vector<std::uint8_t> seen(rows.size(), 0);
    for (const auto& r : rows) {
        const auto col = static_cast<std::size_t>(
            std::lower_bound(gs.days.begin(), gs.days.end(), r.day) - gs.days.begin());
        const std::size_t idx = r.node * gs.days.size() + col;
        if (seen[idx]) {
            throw FormatError(path.string() + ":" + std::to_string(r.line) + ": duplicate (node, day) row");
        }
        seen[idx] = 1;
        gs.values[idx] = r.value;
    }
    return gs;
}

void write_csv(const GriddedSeries& gs, const std::filesystem::path& path) {
    std::string out = "node_id,lat,lon,day_index,value\n";
    for (std::size_t i = 0; i < gs.n_nodes(); ++i) {
        const std::string prefix =
            std::to_string(i) + "," + format_number(gs.grid[i].lat) + "," + format_number(gs.grid[i].lon) + ",";
        const auto vals = gs.node_values(i);
        for (std::size_t k = 0; k < gs.n_days(); ++k) {
            out += prefix;
            out += std::to_string(gs.days[k]);
            out += ',';
            out += format_number(vals[k]);
            out += '\n';
        }
    }
    write_file(path, out);
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    // Write beside the target and rename so readers never see a partial file.
    auto tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_grid_nodes(const GridSpec& grid, const std::filesystem::path& path) {
    std::string out = "node_id,lat,lon\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out += std::to_string(i) + "," + format_number(grid[i].lat) + "," + format_number(grid[i].lon) + "\n";
    }
    write_file(path, out);
}

GridSpec read_grid_nodes(const std::filesystem::path& path) {
    CsvReader csv(path, "node_id,lat,lon");
    std::vector<GeoPoint> nodes;
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        if (f.size() != 3) csv.fail("expected 3 fields");
        if (csv.parse<std::size_t>(f[0], "node_id") != nodes.size()) csv.fail("node ids must be 0..n-1 in order");
        nodes.push_back({csv.parse<double>(f[1], "lat"), csv.parse<double>(f[2], "lon")});
    }
    try {
        return GridSpec(std::move(nodes));
    } catch (const InvalidArgument& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::optional<GridFormat> parse_grid_format(std::string_view s) {
    if (s == "binary") return GridFormat::binary;
    if (s == "csv") return GridFormat::csv;
    return std::nullopt;
}

GriddedSeries load_gridded(const std::filesystem::path& path, GridFormat format) {
    auto gs = format == GridFormat::binary ? load_binary(path) : load_csv(path);
    gs.validate();
    return gs;
}

void write_gridded(const GriddedSeries& gs, const std::filesystem::path& path, GridFormat format) {
    gs.validate();
    if (format == GridFormat::binary)
        write_binary(gs, path);
    else
        write_csv(gs, path);
}

GriddedSeries extract_season(const GriddedSeries& gs, Season season) {
    if (gs.n_days() == 0) throw InvalidArgument("cannot extract a season from an empty series");
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < gs.n_days(); ++k) {
        if (in_season(gs.days[k], season)) keep.push_back(k);
    }
    if (keep.empty()) {
        throw InvalidArgument("no days of season " + std::string(to_string(season)) + " in the series");
    }
    GriddedSeries out;
    out.grid = gs.grid;
    out.days.reserve(keep.size());
    for (auto k : keep) out.days.push_back(gs.days[k]);
    out.values.reserve(gs.n_nodes() * keep.size());
    for (std::size_t i = 0; i < gs.n_nodes(); ++i) {
        const auto vals = gs.node_values(i);
        for (auto k : keep) out.values.push_back(vals[k]);
    }
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_number(float v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_metric_field(const MetricField& mf, const GridSpec& grid, const std::filesystem::path& path) {
    if (mf.size() != grid.size()) throw InvalidArgument("metric field and grid differ in size");
    std::string out = "node_id,lat,lon,value\n";
    json undefined = json::array();
    for (std::size_t i = 0; i < mf.size(); ++i) {
        out += std::to_string(i) + "," + format_number(grid[i].lat) + "," + format_number(grid[i].lon) + "," +
               format_number(mf.values[i]) + "\n";
        if (!mf.defined[i]) undefined.push_back(i);
    }
    write_file(path, out);
    json meta{{"metric", to_string(mf.metric)}, {"n_nodes", mf.size()}, {"undefined", undefined}};
    write_file(sidecar(path), meta.dump(2) + "\n");
}

LoadedMetric read_metric_field(const std::filesystem::path& path) {
    CsvReader csv(path, "node_id,lat,lon,value");
    std::vector<GeoPoint> nodes;
    std::vector<double> values;
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        if (f.size() != 4) csv.fail("expected 4 fields, found " + std::to_string(f.size()));
        if (csv.parse<std::size_t>(f[0], "node_id") != nodes.size()) csv.fail("node ids must be 0..n-1 in order");
        nodes.push_back({csv.parse<double>(f[1], "lat"), csv.parse<double>(f[2], "lon")});
        values.push_back(csv.parse<double>(f[3], "value"));
    }
    LoadedMetric out;
    try {
        out.grid = GridSpec(std::move(nodes));
    } catch (const InvalidArgument& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    out.field.values = std::move(values);
    out.field.defined.assign(out.field.values.size(), 1);
    if (std::filesystem::exists(sidecar(path))) {
        const json meta = read_json(sidecar(path));
        const auto metric = parse_metric(meta.at("metric").get<std::string>());
        if (!metric) throw FormatError(sidecar(path).string() + ": unknown metric");
        if (meta.at("n_nodes").get<std::size_t>() != out.field.size()) {
            throw FormatError(sidecar(path).string() + ": schema mismatch: node count differs from CSV");
        }
        out.field.metric = *metric;
        for (const auto& id : meta.at("undefined")) out.field.defined.at(id.get<std::size_t>()) = 0;
    }
    return out;
}

void write_edge_list(const Network& net, const std::filesystem::path& path) {
    std::string out = "i,j\n";
    for (const auto& [a, b] : net.edges()) out += std::to_string(a) + "," + std::to_string(b) + "\n";
    write_file(path, out);
}

Network read_edge_list(const std::filesystem::path& path, GridSpec grid) {
    CsvReader csv(path, "i,j");
    std::vector<Edge> edges;
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        if (f.size() != 2) csv.fail("expected 2 fields");
        const auto a = csv.parse<std::uint32_t>(f[0], "i");
        const auto b = csv.parse<std::uint32_t>(f[1], "j");
        if (a >= b) csv.fail("edge must satisfy i < j");
        if (b >= grid.size()) csv.fail("edge endpoint outside the grid");
        edges.emplace_back(a, b);
    }
    return Network(std::move(grid), edges);
}

void write_event_set(const EventSet& set, Season season, const std::filesystem::path& path) {
    std::string out = "node_id,day_index\n";
    for (const auto& es : set.series) {
        for (auto d : es.event_days) out += std::to_string(es.node_id) + "," + std::to_string(d) + "\n";
    }
    write_file(path, out);

    json thresholds = json::array();
    for (double t : set.thresholds) {
        if (std::isnan(t))
            thresholds.push_back(nullptr);
        else
            thresholds.push_back(t);
    }
    json meta{
        {"T", set.season_days ? set.season_days->size() : 0},
        {"season", to_string(season)},
        {"percentile", set.spec.percentile},
        {"direction", to_string(set.spec.direction)},
        {"support", to_string(set.spec.support)},
        {"wet_threshold", set.spec.wet_threshold},
        {"dedup", set.dedup},
        {"n_nodes", set.series.size()},
        {"unusable", set.unusable},
        {"thresholds", thresholds},
        {"season_days", set.season_days ? *set.season_days : std::vector<std::int32_t>{}},
    };
    write_file(sidecar(path), meta.dump() + "\n");
}

LoadedEvents read_event_set(const std::filesystem::path& path) {
    const json meta = read_json(sidecar(path));
    LoadedEvents out;
    auto& set = out.set;
    try {
        const auto season = parse_season(meta.at("season").get<std::string>());
        const auto direction = parse_direction(meta.at("direction").get<std::string>());
        const auto support = parse_support(meta.at("support").get<std::string>());
        if (!season || !direction || !support) throw FormatError(sidecar(path).string() + ": bad enum value");
        out.season = *season;
        set.spec = ThresholdSpec{meta.at("percentile").get<double>(), *direction, *support,
                                 meta.at("wet_threshold").get<double>()};
        set.dedup = meta.at("dedup").get<bool>();
        set.season_days =
            std::make_shared<const std::vector<std::int32_t>>(meta.at("season_days").get<std::vector<std::int32_t>>());
        if (set.season_days->size() != meta.at("T").get<std::size_t>()) {
            throw FormatError(sidecar(path).string() + ": T does not match the season day list");
        }
        set.unusable = meta.at("unusable").get<std::vector<std::size_t>>();
        for (const auto& t : meta.at("thresholds")) {
            set.thresholds.push_back(t.is_null() ? std::numeric_limits<double>::quiet_NaN() : t.get<double>());
        }
        const auto n = meta.at("n_nodes").get<std::size_t>();
        set.series.resize(n);
        for (std::size_t i = 0; i < n; ++i) set.series[i] = EventSeries{i, {}, set.season_days};
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(sidecar(path).string() + ": " + e.what());
    }

    CsvReader csv(path, "node_id,day_index");
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        if (f.size() != 2) csv.fail("expected 2 fields");
        const auto node = csv.parse<std::size_t>(f[0], "node_id");
        const auto day = csv.parse<std::int32_t>(f[1], "day_index");
        if (node >= set.series.size()) csv.fail("node_id outside the sidecar's node count");
        auto& days = set.series[node].event_days;
        if (!days.empty() && day <= days.back()) csv.fail("event days not strictly increasing");
        if (!std::binary_search(set.season_days->begin(), set.season_days->end(), day)) {
            csv.fail("event day outside the season universe");
        }
        days.push_back(day);
    }
    return out;
}

}  // namespace gridsync
