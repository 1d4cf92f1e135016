#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace gridsync {

enum class Season { JJA, DJF };

std::string_view to_string(Season s);
std::optional<Season> parse_season(std::string_view s);

/// Day index (days since 1970-01-01, proleptic Gregorian) of a civil date.
std::int32_t day_index(int year, unsigned month, unsigned day);

/// Calendar month (1..12) of a day index.
unsigned month_of(std::int32_t day);

bool in_season(std::int32_t day, Season s);

}  // namespace gridsync
