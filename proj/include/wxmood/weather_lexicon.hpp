#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wxmood/corpus.hpp"
#include "wxmood/fraction.hpp"
#include "wxmood/induction.hpp"
#include "wxmood/lexicon.hpp"
#include "wxmood/weather_grid.hpp"

namespace wxmood {

inline constexpr std::array<std::string_view, 6> kTagTokens{"top1", "top2", "top3", "low1", "low2", "low3"};

struct TagParams {
    Fraction band = Fraction::from_double(0.01);
    int bands = 3;
    std::size_t min_records = 600;
};

struct BandReport {
    std::string tag;
    std::size_t count = 0;
    double z_threshold = 0.0; // weakest z inside the band
};

struct TaggedCorpus {
    Variable variable = Variable::Tmax;
    std::vector<std::string> texts; // training copy, parallel to the records
    std::vector<BandReport> bands;  // top1..topK then low1..lowK
    std::size_t ranked = 0;         // records with a valid z
    std::size_t band_size = 0;
};

/// Throws TagCollisionError when a tag token already occurs in some text.
void check_tag_collision(std::span<const TweetRecord> records);

/// Ranks the records with a valid z for `variable` (descending, ties by id)
/// and appends " topK" / " lowK" to the training copy of the texts in each
/// band of floor(N * band) records. Throws DataError when N < min_records.
TaggedCorpus tag_percentiles(std::span<const TweetRecord> records, std::span<const ConditionAnnotation> annotations,
                             Variable variable, const TagParams& params = {});

/// Induces the weather-intensity scale for one variable from the tagged
/// texts. Tag tokens are exempt from min_count and dropped from the result.
Lexicon build_weather_scale(const TaggedCorpus& tagged, GraphParams graph = {},
                            const PropagationParams& walk = {}, const SeedPair& seeds = default_scale_seeds());

struct ScatterRow {
    std::string token;
    double sentiment = 0.0;
    double weather = 0.0;
    std::size_t frequency = 0;
};

/// Tokens present in both lexicons with frequency >= min_frequency, ordered
/// by |sentiment| * |weather| descending, then token. Throws DataError when
/// nothing remains.
std::vector<ScatterRow> emit_word_scatter(const Lexicon& sentiment, const Lexicon& weather,
                                          const std::unordered_map<std::string, std::size_t>& frequency,
                                          std::size_t min_frequency = 0);

std::string scatter_csv(std::span<const ScatterRow> rows);

/// Token counts over the content tokens of the given texts.
std::unordered_map<std::string, std::size_t> token_frequencies(std::span<const std::string> texts);

} // namespace wxmood
