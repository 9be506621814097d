#include "wxmood/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "wxmood/errors.hpp"

namespace wxmood {

using nlohmann::json;

std::string_view to_string(RejectReason reason) {
    switch (reason) {
    case RejectReason::MalformedJson: return "malformed_json";
    case RejectReason::MissingField: return "missing_field";
    case RejectReason::BadTimestamp: return "bad_timestamp";
    case RejectReason::BadGeometry: return "bad_geometry";
    case RejectReason::EmptyId: return "empty_id";
    case RejectReason::OutsideWindow: return "outside_window";
    case RejectReason::DuplicateId: return "duplicate_id";
    }
    return "unknown";
}

namespace {

bool counts_as_malformed(RejectReason r) {
    return r != RejectReason::OutsideWindow && r != RejectReason::DuplicateId;
}

struct LineError {
    RejectReason reason;
    std::string detail;
};

const json* string_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        return nullptr;
    return &*it;
}

std::variant<Geometry, LineError> parse_geometry(const json& obj) {
    auto geo = obj.find("geo");
    if (geo == obj.end() || !geo->is_object())
        return LineError{RejectReason::MissingField, "geo"};
    auto type = geo->find("type");
    auto coords = geo->find("coords");
    if (type == geo->end() || !type->is_string() || coords == geo->end() || !coords->is_array())
        return LineError{RejectReason::BadGeometry, "geo needs string 'type' and array 'coords'"};
    std::vector<double> c;
    for (const auto& v : *coords) {
        if (!v.is_number())
            return LineError{RejectReason::BadGeometry, "non-numeric coordinate"};
        c.push_back(v.get<double>());
    }
    const auto& t = type->get_ref<const std::string&>();
    if (t == "point") {
        if (c.size() != 2)
            return LineError{RejectReason::BadGeometry, "point needs [lon, lat]"};
        LonLat p{c[0], c[1]};
        if (!valid_position(p))
            return LineError{RejectReason::BadGeometry, "point out of range"};
        return Geometry{p};
    }
    if (t == "bbox") {
        if (c.size() != 4)
            return LineError{RejectReason::BadGeometry, "bbox needs [lon_min, lat_min, lon_max, lat_max]"};
        BBox b{c[0], c[1], c[2], c[3]};
        if (!valid_bbox(b))
            return LineError{RejectReason::BadGeometry, "bbox out of range or min > max"};
        return Geometry{b};
    }
    return LineError{RejectReason::BadGeometry, fmt::format("unknown geo type '{}'", t)};
}

std::variant<TweetRecord, LineError> parse_line(std::string_view line) {
    json obj = json::parse(line.begin(), line.end(), nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
        return LineError{RejectReason::MalformedJson, "not a JSON object"};

    for (const char* key : {"id", "ts", "text", "handle", "display"})
        if (!string_field(obj, key))
            return LineError{RejectReason::MissingField, key};

    TweetRecord rec;
    rec.id = obj["id"].get<std::string>();
    if (rec.id.empty())
        return LineError{RejectReason::EmptyId, "id"};
    const auto ts = parse_timestamp(obj["ts"].get_ref<const std::string&>());
    if (!ts)
        return LineError{RejectReason::BadTimestamp, obj["ts"].get<std::string>()};
    rec.timestamp = *ts;
    rec.text = obj["text"].get<std::string>();
    rec.author_handle = obj["handle"].get<std::string>();
    rec.author_display = obj["display"].get<std::string>();

    auto geo = parse_geometry(obj);
    if (auto* err = std::get_if<LineError>(&geo))
        return *err;
    rec.geometry = std::get<Geometry>(geo);
    return rec;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c - 'A' + 'a');
    return out;
}

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

} // namespace

ParsedCorpus parse_corpus(std::istream& in, const DateRange& window) {
    ParsedCorpus out;
    std::unordered_set<std::string> seen;
    std::size_t malformed = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        ++out.lines_read;

        auto parsed = parse_line(line);
        if (auto* err = std::get_if<LineError>(&parsed)) {
            if (counts_as_malformed(err->reason))
                ++malformed;
            out.rejections.push_back({line_no, err->reason, std::move(err->detail)});
            continue;
        }
        auto& rec = std::get<TweetRecord>(parsed);
        if (!window.contains(rec.timestamp)) {
            out.rejections.push_back({line_no, RejectReason::OutsideWindow, format_timestamp(rec.timestamp)});
            continue;
        }
        if (!seen.insert(rec.id).second) {
            out.rejections.push_back({line_no, RejectReason::DuplicateId, rec.id});
            continue;
        }
        out.records.push_back(std::move(rec));
    }
    if (in.bad())
        throw DataError("read error on corpus stream");
    if (malformed * 2 > out.lines_read)
        throw DataError(fmt::format("{} of {} corpus lines are malformed; first problem at line {}: {}", malformed,
                                    out.lines_read, out.rejections.front().line,
                                    to_string(out.rejections.front().reason)));
    return out;
}

ParsedCorpus parse_corpus(const std::filesystem::path& path, const DateRange& window) {
    std::ifstream in(path);
    if (!in)
        throw DataError(fmt::format("cannot open corpus '{}'", path.string()));
    return parse_corpus(in, window);
}

std::string to_json_line(const TweetRecord& r) {
    json geo;
    if (const auto* p = std::get_if<LonLat>(&r.geometry)) {
        geo = {{"type", "point"}, {"coords", {p->lon, p->lat}}};
    } else {
        const auto& b = std::get<BBox>(r.geometry);
        geo = {{"type", "bbox"}, {"coords", {b.lon_min, b.lat_min, b.lon_max, b.lat_max}}};
    }
    json obj = {{"id", r.id},
                {"ts", format_timestamp(r.timestamp)},
                {"text", r.text},
                {"handle", r.author_handle},
                {"display", r.author_display},
                {"geo", geo}};
    return obj.dump();
}

std::string format_rejections(const std::vector<Rejection>& rejections) {
    std::string out;
    for (const auto& r : rejections)
        out += fmt::format("{}\t{}\t{}\n", r.line, to_string(r.reason), r.detail);
    return out;
}

HighVolumeResult filter_high_volume_authors(const std::vector<TweetRecord>& records, Fraction threshold) {
    std::unordered_map<std::string_view, std::size_t> counts;
    for (const auto& r : records)
        ++counts[r.author_handle];

    const auto n = static_cast<std::int64_t>(records.size());
    HighVolumeResult out;
    std::unordered_set<std::string_view> banned;
    for (const auto& [author, count] : counts) {
        if (threshold.exceeded_by(static_cast<std::int64_t>(count), n)) {
            banned.insert(author);
            out.removed.push_back({std::string(author), count});
        }
    }
    std::sort(out.removed.begin(), out.removed.end(), [](const AuthorCount& a, const AuthorCount& b) {
        return a.count != b.count ? a.count > b.count : a.author < b.author;
    });
    for (const auto& r : records)
        if (!banned.contains(r.author_handle))
            out.kept.push_back(r);
    return out;
}

std::vector<TweetRecord> filter_weather_usernames(const std::vector<TweetRecord>& records) {
    std::vector<TweetRecord> kept;
    for (const auto& r : records) {
        const bool named = ascii_lower(r.author_handle).find("weather") != std::string::npos ||
                           ascii_lower(r.author_display).find("weather") != std::string::npos;
        if (!named)
            kept.push_back(r);
    }
    return kept;
}

bool mentions_unit_token(std::string_view text) {
    const std::string lower = ascii_lower(text);
    for (std::string_view unit : {"mph", "hpa"}) {
        for (std::size_t pos = lower.find(unit); pos != std::string::npos; pos = lower.find(unit, pos + 1)) {
            const bool glued_left = pos > 0 && is_ascii_alpha(lower[pos - 1]);
            const bool glued_right = pos + unit.size() < lower.size() && is_ascii_alpha(lower[pos + unit.size()]);
            if (!glued_left && !glued_right)
                return true;
        }
    }
    return false;
}

bool mentions_under_the_weather(std::string_view text) {
    std::string squashed;
    squashed.reserve(text.size());
    bool in_space = false;
    for (char c : ascii_lower(text)) {
        const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
        if (space) {
            if (!in_space)
                squashed.push_back(' ');
        } else {
            squashed.push_back(c);
        }
        in_space = space;
    }
    return squashed.find("under the weather") != std::string::npos;
}

std::vector<TweetRecord> filter_structured_reports(const std::vector<TweetRecord>& records) {
    std::vector<TweetRecord> kept;
    for (const auto& r : records)
        if (!mentions_unit_token(r.text) && !mentions_under_the_weather(r.text))
            kept.push_back(r);
    return kept;
}

} // namespace wxmood
