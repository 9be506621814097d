#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wxmood::csv {

/// Splits one CSV line into fields. Double-quoted fields may contain commas
/// and doubled quotes; embedded newlines are not supported.
std::vector<std::string> split(std::string_view line);

/// Quotes a field only when it contains a comma, quote or leading/trailing space.
std::string quote(std::string_view field);

/// Shortest decimal form that round-trips to the same double.
std::string number(double value);

std::string optional_number(const std::optional<double>& value);

/// Parses a full-field double; throws DataError with `context` on failure.
double parse_double(std::string_view field, std::string_view context);
long long parse_int(std::string_view field, std::string_view context);

/// Reads all lines of a text file (CR stripped); throws DataError when the
/// file cannot be opened.
std::vector<std::string> read_lines(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace wxmood::csv
