#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wxmood {

/// Token → polarity score in [-1, 1] along one named axis.
class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(std::string axis) : axis_(std::move(axis)) {}

    const std::string& axis() const { return axis_; }

    /// Throws std::invalid_argument for non-finite or out-of-range scores.
    void set(std::string token, double score);
    bool contains(std::string_view token) const;
    /// Score, or 0 for tokens not in the lexicon.
    double score(std::string_view token) const;
    std::size_t size() const { return scores_.size(); }
    bool empty() const { return scores_.empty(); }

    /// Entries sorted by token.
    std::vector<std::pair<std::string, double>> sorted() const;

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };

    std::string axis_;
    std::unordered_map<std::string, double, Hash, std::equal_to<>> scores_;
};

inline double score_lookup(const Lexicon& lexicon, std::string_view token) { return lexicon.score(token); }

/// CSV "token,score" preceded by "# axis: <name>".
std::string lexicon_csv(const Lexicon& lexicon);
Lexicon parse_lexicon_csv(std::string_view text);
Lexicon load_lexicon(const std::filesystem::path& path);

/// One pole of a scale: token → restart weight (> 0).
struct SeedSet {
    std::map<std::string, double> weights;
};

struct SeedPair {
    SeedSet positive;
    SeedSet negative;
};

/// Validates positive weights and disjoint sides; throws ConfigError.
void validate(const SeedPair& seeds);

/// JSON {"positive": {"lovely": 1, ...}, "negative": {...}}. Arrays of tokens
/// are accepted as shorthand for weight 1.
SeedPair parse_seeds_json(std::string_view text);
SeedPair load_seeds(const std::filesystem::path& path);
std::string seeds_json(const SeedPair& seeds);

/// The textual sentiment seed words shipped as defaults.
SeedPair default_sentiment_seeds();

/// {top1: 3, top2: 2, top3: 1} against {low1: 3, low2: 2, low3: 1}.
SeedPair default_scale_seeds();

} // namespace wxmood
