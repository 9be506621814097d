#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wxmood/analytics.hpp"
#include "wxmood/induction.hpp"
#include "wxmood/time.hpp"
#include "wxmood/weather_grid.hpp"
#include "wxmood/weather_lexicon.hpp"

namespace wxmood::app {

namespace fs = std::filesystem;

struct SynthParams {
    std::uint64_t seed = 1;
    std::size_t tweets = 20'000; // genuine tweets, before noise records
    int study_year = 2021;
    int climatology_start = 2011;
    int climatology_end = 2020;

    // Planted response of sentiment to the tmax z-score: `floor` up to
    // peak_z - rise_width, a linear rise to `peak` at peak_z, then a linear
    // fall back to `floor` at peak_z + fall_width.
    double peak_z = 1.5;
    double peak = 0.6;
    double floor = -0.6;
    double rise_width = 3.5;
    double fall_width = 0.75;
    double response_scale = 1.0; // 0 plants no response at all

    double north_intensity = 1.5;
    double south_shift = 3.0; // degrees C added to the southern baseline
    double missing_fraction = 0.002;
};

struct Config {
    fs::path corpus;
    fs::path grid_dir;
    fs::path regions;
    fs::path sentiment_seeds; // empty: shipped defaults
    fs::path scale_seeds;     // empty: {top1: 3, ...} against {low1: 3, ...}
    fs::path rules;           // empty: default scoring rules
    fs::path out = "out";

    DateRange study{Date{std::chrono::year{2021} / 1 / 1}, Date{std::chrono::year{2021} / 12 / 31}};
    double high_volume_fraction = 0.01;

    YearWindow window;
    std::int64_t min_obs = kDefaultMinObs;

    double overlap_fraction = 0.5;
    std::array<std::string, 2> groups{"North", "South"};
    Variable compare_variable = Variable::Tmax;

    GraphParams graph;
    PropagationParams walk;

    TagParams tags;
    std::size_t scatter_min_frequency = 10;

    CurveParams curves;
    PairParams pairs;
    std::vector<std::pair<Variable, Variable>> pair_list;

    std::uint64_t seed = 1;
    unsigned threads = 1;

    SynthParams synth;
};

/// INI text with [paths], [study], [ingest], [climatology], [regions],
/// [lexicon], [scales], [curves], [pairs], [run] and [synth] sections.
/// Unknown sections or keys are rejected. Relative paths are resolved
/// against `base_dir`. Throws ConfigError.
Config parse_config(std::string_view text, const fs::path& base_dir = {});
Config load_config(const fs::path& path);

/// Canonical INI rendering of the analysis parameters; paths, thread count
/// and generator settings are left out since they do not change results.
std::string config_ini(const Config& config);

/// All ten unordered pairs of the five variables.
std::vector<std::pair<Variable, Variable>> all_variable_pairs();

} // namespace wxmood::app
