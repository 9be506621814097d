#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "wxmood/app/config.hpp"
#include "wxmood/corpus.hpp"
#include "wxmood/regions.hpp"
#include "wxmood/weather_grid.hpp"

namespace wxmood::app {

/// mt19937_64 with fixed uniform/normal transforms, so a seed gives the same
/// stream with any standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double normal();
    std::size_t below(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(uniform() * n)); }
    bool chance(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Word lists the generator draws from.
struct SynthVocabulary {
    std::vector<std::string> positive_seeds;
    std::vector<std::string> negative_seeds;
    std::vector<std::string> positive_planted;
    std::vector<std::string> negative_planted;
    std::vector<std::string> hot;
    std::vector<std::string> cold;
    std::vector<std::string> filler;
    std::string top_only = "scorchio"; // only in the top 1% of tmax z
    std::string low_only = "baltic";   // only in the bottom 1% of tmax z
    std::string uniform = "cuppa";     // in 30% of genuine tweets
};

const SynthVocabulary& synth_vocabulary();

/// Planted sentiment response to the tmax z-score, before regional intensity.
double planted_response(const SynthParams& params, double z);

struct SynthData {
    SynthParams params;
    GridDataset dataset;
    std::vector<Region> regions;
    std::vector<TweetRecord> records; // genuine and noise records, by timestamp then id
    std::vector<double> planted;      // planted sentiment per record; NaN for noise records
    std::vector<bool> genuine;
    std::size_t bot_posts = 0;
    std::size_t weather_account_posts = 0;
    std::size_t report_posts = 0; // unit tokens or "under the weather"
    std::string ground_truth;      // JSON
};

/// Deterministic corpus, grid and regions for a seed. An 8 x 4 grid of
/// 0.25 degree cells split into eight regions, four per group.
SynthData generate_synthetic(const SynthParams& params);

/// Writes corpus.jsonl, grid/ (grid.json plus one CSV per year),
/// regions.geojson, ground_truth.json, planted.csv and a runnable wxmood.ini.
void write_synthetic(const SynthData& data, const std::filesystem::path& dir);

std::string regions_geojson(const std::vector<Region>& regions);

} // namespace wxmood::app
