#include "gridsync/calendar.hpp"

#include <chrono>

namespace gridsync {

std::string_view to_string(Season s) { return s == Season::JJA ? "JJA" : "DJF"; }

std::optional<Season> parse_season(std::string_view s) {
    if (s == "JJA") return Season::JJA;
    if (s == "DJF") return Season::DJF;
    return std::nullopt;
}

std::int32_t day_index(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    const sys_days d{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
    return static_cast<std::int32_t>(d.time_since_epoch().count());
}

unsigned month_of(std::int32_t day) {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{days{day}}};
    return static_cast<unsigned>(ymd.month());
}

bool in_season(std::int32_t day, Season s) {
    const unsigned m = month_of(day);
    if (s == Season::JJA) return m >= 6 && m <= 8;
    return m == 12 || m <= 2;
}

}  // namespace gridsync
