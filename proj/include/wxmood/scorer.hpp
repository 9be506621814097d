#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wxmood/corpus.hpp"
#include "wxmood/lexicon.hpp"
#include "wxmood/weather_grid.hpp"

namespace wxmood {

struct ScoringRules {
    std::set<std::string> negations;
    std::map<std::string, double> boosters; // signed increments
    double caps_increment = 0.733;
    double exclamation_increment = 0.292;
    int exclamation_cap = 3;
    double negation_damping = -0.74;
    double lexicon_scale = 4.0;
    double alpha = 15.0;
    int lookback = 3;

    /// Throws ConfigError when an invariant is broken.
    void validate() const;

    /// Negation and booster word lists of the rule family, with the constants above.
    static ScoringRules defaults();
};

ScoringRules parse_rules_json(std::string_view text);
std::string rules_json(const ScoringRules& rules);

/// Sentiment of one text in [-1, 1]; 0 when no token carries lexicon valence.
double score_text(std::string_view text, const Lexicon& lexicon, const ScoringRules& rules);

struct ScoredTweet {
    std::string id;
    Timestamp timestamp;
    double sentiment = 0.0;
    ConditionAnnotation conditions;
    std::optional<std::string> region;
};

/// Scores every record, preserving order. `annotations`, when given, must be
/// parallel to `records`.
std::vector<ScoredTweet> score_corpus(std::span<const TweetRecord> records, const Lexicon& lexicon,
                                      const ScoringRules& rules,
                                      std::span<const ConditionAnnotation> annotations = {}, unsigned threads = 1);

/// "id,ts,sentiment,tmax,z_tmax,...,pressure,z_pressure,region"; invalid
/// values are empty cells.
std::string scored_csv(std::span<const ScoredTweet> tweets);
std::vector<ScoredTweet> parse_scored_csv(std::string_view text);

} // namespace wxmood
