#include "wxmood/time.hpp"

#include <charconv>

#include <fmt/format.h>

namespace wxmood {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size())
        return false;
    for (std::size_t i = pos; i < pos + len; ++i)
        if (s[i] < '0' || s[i] > '9')
            return false;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc{};
}

} // namespace

std::optional<Date> parse_date(std::string_view s) {
    int y = 0, m = 0, d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        return std::nullopt;
    if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, m) || !read_int(s, 8, 2, d))
        return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok())
        return std::nullopt;
    return Date{ymd};
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
    auto date = parse_date(s.substr(0, std::min<std::size_t>(10, s.size())));
    if (!date)
        return std::nullopt;
    if (s.size() == 10)
        return Timestamp{*date};
    if (s[10] != 'T' && s[10] != ' ')
        return std::nullopt;

    int hh = 0, mm = 0, ss = 0;
    if (!read_int(s, 11, 2, hh) || s.size() < 19 || s[13] != ':' || !read_int(s, 14, 2, mm) || s[16] != ':' ||
        !read_int(s, 17, 2, ss))
        return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 60)
        return std::nullopt;

    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        const std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9')
            ++pos;
        if (pos == start)
            return std::nullopt;
    }

    std::chrono::seconds offset{0};
    if (pos < s.size()) {
        if (s[pos] == 'Z' && pos + 1 == s.size()) {
            // UTC
        } else if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':') {
            int oh = 0, om = 0;
            if (!read_int(s, pos + 1, 2, oh) || !read_int(s, pos + 4, 2, om))
                return std::nullopt;
            offset = std::chrono::hours{oh} + std::chrono::minutes{om};
            if (s[pos] == '-')
                offset = -offset;
        } else {
            return std::nullopt;
        }
    }

    return Timestamp{*date} + std::chrono::hours{hh} + std::chrono::minutes{mm} + std::chrono::seconds{ss} - offset;
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()));
}

std::string format_timestamp(Timestamp ts) {
    const Date d = date_of(ts);
    const std::chrono::hh_mm_ss tod{ts - d};
    return fmt::format("{}T{:02d}:{:02d}:{:02d}Z", format_date(d), tod.hours().count(), tod.minutes().count(),
                       tod.seconds().count());
}

int year_of(Date d) { return static_cast<int>(std::chrono::year_month_day{d}.year()); }

} // namespace wxmood
