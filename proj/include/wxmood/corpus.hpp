#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "wxmood/fraction.hpp"
#include "wxmood/geometry.hpp"
#include "wxmood/time.hpp"

namespace wxmood {

struct TweetRecord {
    std::string id;
    Timestamp timestamp;
    std::string text;
    std::string author_handle;
    std::string author_display;
    Geometry geometry;
};

enum class RejectReason {
    MalformedJson,
    MissingField,
    BadTimestamp,
    BadGeometry,
    EmptyId,
    OutsideWindow,
    DuplicateId,
};

std::string_view to_string(RejectReason reason);

struct Rejection {
    std::size_t line = 0; // 1-based
    RejectReason reason;
    std::string detail;
};

struct ParsedCorpus {
    std::vector<TweetRecord> records;
    std::vector<Rejection> rejections;
    std::size_t lines_read = 0; // non-blank lines
};

/// Parses line-delimited JSON records:
///   {"id": str, "ts": ISO-8601, "text": str, "handle": str, "display": str,
///    "geo": {"type": "point"|"bbox", "coords": [...]}}
/// Point coords are [lon, lat]; bbox coords are [lon_min, lat_min, lon_max, lat_max].
/// Bad lines are logged and skipped; duplicates keep the first occurrence.
/// Throws DataError when more than half of the non-blank lines are malformed.
ParsedCorpus parse_corpus(std::istream& in, const DateRange& window);
ParsedCorpus parse_corpus(const std::filesystem::path& path, const DateRange& window);

/// One JSON line in the same schema parse_corpus reads.
std::string to_json_line(const TweetRecord& record);

/// Rejection log text: "line<TAB>reason<TAB>detail" per entry.
std::string format_rejections(const std::vector<Rejection>& rejections);

struct AuthorCount {
    std::string author;
    std::size_t count = 0;
};

struct HighVolumeResult {
    std::vector<TweetRecord> kept;
    std::vector<AuthorCount> removed; // sorted by count descending, then name
};

/// Drops every author (keyed by handle) whose record count strictly exceeds
/// threshold × N, where N is the size of `records`.
HighVolumeResult filter_high_volume_authors(const std::vector<TweetRecord>& records,
                                            Fraction threshold = Fraction::from_double(0.01));

/// Drops records whose handle or display name contains "weather" (any case).
std::vector<TweetRecord> filter_weather_usernames(const std::vector<TweetRecord>& records);

/// Predicates behind filter_structured_reports, exposed for reporting.
bool mentions_unit_token(std::string_view text);
bool mentions_under_the_weather(std::string_view text);

/// Drops records whose text has a standalone "mph"/"hpa" (any case, not
/// glued to a letter) or the phrase "under the weather".
std::vector<TweetRecord> filter_structured_reports(const std::vector<TweetRecord>& records);

} // namespace wxmood
