#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wxmood/app/synth.hpp"
#include "wxmood/corpus.hpp"
#include "wxmood/weather_grid.hpp"

namespace wxmood::test {

inline std::filesystem::path data_dir() { return WXMOOD_TEST_DATA; }

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("wxmood_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline TweetRecord make_record(std::string id, std::string text, std::string handle = "someone",
                               Geometry geo = LonLat{-1.0, 52.0}) {
    TweetRecord r;
    r.id = std::move(id);
    r.timestamp = *parse_timestamp("2021-06-01T12:00:00Z");
    r.text = std::move(text);
    r.author_handle = handle;
    r.author_display = handle;
    r.geometry = geo;
    return r;
}

// 4 x 4 grid holding 2019-2020 as the reference window and 2021 as the study
// year, with a smooth seasonal cycle plus hashed noise per (variable, day, cell).
inline GridDataset grid_fixture() {
    const GridSpec spec{55.0, -4.0, 0.25, 0.25, 4, 4};
    const Date first = *parse_date("2019-01-01");
    const Date last = *parse_date("2021-12-31");
    GridDataset ds(spec, first, last);
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    auto noise = [&h] {
        h ^= h >> 31;
        h *= 0xbf58476d1ce4e5b9ULL;
        h ^= h >> 27;
        return static_cast<double>(h >> 11) * 0x1.0p-53;
    };
    for (Date d = first; d <= last; d += std::chrono::days{1}) {
        const double season = std::sin(2.0 * 3.141592653589793 * (d - first).count() / 365.25);
        for (Variable v : kVariables) {
            DailyField f{d, v, std::vector<double>(spec.cell_count())};
            for (std::size_t c = 0; c < spec.cell_count(); ++c) {
                const double u = noise();
                switch (v) {
                case Variable::Tmax: f.values[c] = 12.0 + 8.0 * season + 0.3 * c + 4.0 * u; break;
                case Variable::Precip: f.values[c] = u < 0.5 ? 0.0 : 20.0 * (u - 0.5); break;
                case Variable::Wind: f.values[c] = 3.0 + 10.0 * u; break;
                case Variable::Humidity: f.values[c] = 60.0 + 35.0 * u; break;
                case Variable::Pressure: f.values[c] = 1000.0 + 5.0 * season + 20.0 * u; break;
                }
            }
            ds.set_field(f);
        }
    }
    return ds;
}

} // namespace wxmood::test
