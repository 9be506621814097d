#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace wxmood {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Parses "YYYY-MM-DDTHH:MM:SS" with an optional fractional part and an
/// optional "Z" or "+HH:MM"/"-HH:MM" offset. Bare dates ("YYYY-MM-DD") are
/// accepted as midnight UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);

std::optional<Date> parse_date(std::string_view text);

std::string format_timestamp(Timestamp ts); // 2021-06-01T12:00:00Z
std::string format_date(Date d);            // 2021-06-01

inline Date date_of(Timestamp ts) { return std::chrono::floor<std::chrono::days>(ts); }

int year_of(Date d);

/// Inclusive calendar-date range.
struct DateRange {
    Date first;
    Date last;

    bool contains(Date d) const { return first <= d && d <= last; }
    bool contains(Timestamp ts) const { return contains(date_of(ts)); }
};

} // namespace wxmood
