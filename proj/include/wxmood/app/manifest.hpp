#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace wxmood::app {

inline constexpr std::string_view kVersion = "1.0.0";

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
    std::string path; // relative to the output directory, or the input's file name
    std::string sha256;
};

struct Manifest {
    std::map<std::string, std::vector<FileDigest>> artifacts;
    std::vector<FileDigest> auxiliary;
    std::vector<FileDigest> inputs;
    std::string parameters; // canonical config text
};

/// Hashes `relative` under `root` and records it.
FileDigest digest(const std::filesystem::path& root, const std::filesystem::path& relative);

/// JSON with sorted keys and no timestamps, so reruns compare byte for byte.
std::string manifest_json(const Manifest& manifest);

} // namespace wxmood::app
