#include "wxmood/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "wxmood/csv.hpp"
#include "wxmood/errors.hpp"
#include "wxmood/parallel.hpp"
#include "wxmood/tokenize.hpp"

namespace wxmood {

namespace {

constexpr double kBoost = 0.293;

bool has_letter(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); });
}

bool is_all_caps(std::string_view s) {
    return has_letter(s) && std::none_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

bool is_negation(const ScoringRules& rules, const std::string& token) {
    return rules.negations.contains(token) || (token.size() > 3 && token.ends_with("n't"));
}

} // namespace

void ScoringRules::validate() const {
    if (!(negation_damping > -1.0 && negation_damping < 0.0))
        throw ConfigError(fmt::format("negation damping {} outside (-1, 0)", negation_damping));
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ConfigError(fmt::format("normalisation alpha {} must be positive", alpha));
    for (double v : {caps_increment, exclamation_increment, lexicon_scale})
        if (!std::isfinite(v))
            throw ConfigError("scoring increments must be finite");
    for (const auto& [t, v] : boosters)
        if (!std::isfinite(v))
            throw ConfigError(fmt::format("booster '{}' has a non-finite increment", t));
    if (exclamation_cap < 0 || lookback < 0)
        throw ConfigError("exclamation cap and lookback must be non-negative");
}

ScoringRules ScoringRules::defaults() {
    ScoringRules r;
    r.negations = {"aint",    "arent",    "cannot",  "cant",    "couldnt", "darent",  "didnt",   "doesnt",
                   "ain't",   "aren't",   "can't",   "couldn't", "daren't", "didn't",  "doesn't", "dont",
                   "hadnt",   "hasnt",    "havent",  "isnt",    "mightnt", "mustnt",  "neither", "don't",
                   "hadn't",  "hasn't",   "haven't", "isn't",   "mightn't", "mustn't", "neednt",  "needn't",
                   "never",   "none",     "nope",    "nor",     "not",     "nothing", "nowhere", "oughtnt",
                   "shant",   "shouldnt", "uhuh",    "wasnt",   "werent",  "oughtn't", "shan't", "shouldn't",
                   "uh-uh",   "wasn't",   "weren't", "without", "wont",    "wouldnt", "won't",   "wouldn't",
                   "rarely",  "seldom",   "despite"};
    for (const char* w : {"absolutely", "amazingly", "awfully", "completely", "considerably", "decidedly", "deeply",
                          "effing", "enormously", "entirely", "especially", "exceptionally", "extremely",
                          "fabulously", "flipping", "flippin", "fricking", "frickin", "frigging", "friggin", "fully",
                          "fucking", "greatly", "hella", "highly", "hugely", "incredibly", "intensely", "majorly",
                          "more", "most", "particularly", "purely", "quite", "really", "remarkably", "so",
                          "substantially", "thoroughly", "totally", "tremendously", "uber", "unbelievably",
                          "unusually", "utterly", "very"})
        r.boosters[w] = kBoost;
    for (const char* w : {"almost", "barely", "hardly", "kinda", "kindof", "kind-of", "less", "little", "marginally",
                          "occasionally", "partly", "scarcely", "slightly", "somewhat", "sorta", "sortof", "sort-of"})
        r.boosters[w] = -kBoost;
    return r;
}

ScoringRules parse_rules_json(std::string_view text) {
    auto doc = nlohmann::json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw ConfigError("scoring rules must be a JSON object");
    ScoringRules r = ScoringRules::defaults();
    try {
        for (const auto& [key, val] : doc.items()) {
            if (key == "negations") {
                r.negations = val.get<std::set<std::string>>();
            } else if (key == "boosters") {
                r.boosters = val.get<std::map<std::string, double>>();
            } else if (key == "caps_increment") {
                r.caps_increment = val.get<double>();
            } else if (key == "exclamation_increment") {
                r.exclamation_increment = val.get<double>();
            } else if (key == "exclamation_cap") {
                r.exclamation_cap = val.get<int>();
            } else if (key == "negation_damping") {
                r.negation_damping = val.get<double>();
            } else if (key == "lexicon_scale") {
                r.lexicon_scale = val.get<double>();
            } else if (key == "alpha") {
                r.alpha = val.get<double>();
            } else if (key == "lookback") {
                r.lookback = val.get<int>();
            } else {
                throw ConfigError(fmt::format("unknown scoring rule '{}'", key));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("scoring rules: {}", e.what()));
    }
    r.validate();
    return r;
}

std::string rules_json(const ScoringRules& r) {
    nlohmann::ordered_json doc;
    doc["negations"] = r.negations;
    doc["boosters"] = r.boosters;
    doc["caps_increment"] = r.caps_increment;
    doc["exclamation_increment"] = r.exclamation_increment;
    doc["exclamation_cap"] = r.exclamation_cap;
    doc["negation_damping"] = r.negation_damping;
    doc["lexicon_scale"] = r.lexicon_scale;
    doc["alpha"] = r.alpha;
    doc["lookback"] = r.lookback;
    return doc.dump(2) + "\n";
}

double score_text(std::string_view text, const Lexicon& lexicon, const ScoringRules& rules) {
    const auto all = tokenize_detailed(text);
    std::vector<const Token*> words;
    int exclamations = 0;
    bool any_lower = false, any_upper = false;
    for (const auto& t : all) {
        if (t.kind == TokenKind::Punct) {
            exclamations += t.text == "!";
            continue;
        }
        words.push_back(&t);
        for (char c : t.surface) {
            any_lower |= c >= 'a' && c <= 'z';
            any_upper |= c >= 'A' && c <= 'Z';
        }
    }
    const bool mixed_case = any_lower && any_upper;

    double sum = 0.0;
    bool any_valence = false;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const auto& tok = *words[i];
        if (rules.boosters.contains(tok.text) || !lexicon.contains(tok.text))
            continue;
        double valence = lexicon.score(tok.text) * rules.lexicon_scale;
        if (valence == 0.0)
            continue;
        any_valence = true;
        const double sign = valence > 0.0 ? 1.0 : -1.0;
        if (mixed_case && is_all_caps(tok.surface))
            valence += sign * rules.caps_increment;

        bool negated = false;
        for (int k = 1; k <= rules.lookback && static_cast<std::size_t>(k) <= i; ++k) {
            const auto& prev = *words[i - static_cast<std::size_t>(k)];
            if (auto b = rules.boosters.find(prev.text); b != rules.boosters.end()) {
                double scalar = b->second * sign;
                if (mixed_case && is_all_caps(prev.surface))
                    scalar += sign * rules.caps_increment;
                const double decay = k == 1 ? 1.0 : k == 2 ? 0.95 : 0.9;
                valence += scalar * decay;
            }
            negated |= is_negation(rules, prev.text);
        }
        if (negated)
            valence *= rules.negation_damping;
        sum += valence;
    }
    if (!any_valence)
        return 0.0;
    if (sum != 0.0) {
        const int marks = std::min(exclamations, rules.exclamation_cap);
        sum += (sum > 0.0 ? 1.0 : -1.0) * marks * rules.exclamation_increment;
    }
    const double score = sum / std::sqrt(sum * sum + rules.alpha);
    return std::clamp(score, -1.0, 1.0);
}

std::vector<ScoredTweet> score_corpus(std::span<const TweetRecord> records, const Lexicon& lexicon,
                                      const ScoringRules& rules, std::span<const ConditionAnnotation> annotations,
                                      unsigned threads) {
    if (!annotations.empty() && annotations.size() != records.size())
        throw DataError("score_corpus: annotations are not parallel to the records");
    std::vector<ScoredTweet> out(records.size());
    parallel_for(records.size(), threads, [&](std::size_t i) {
        out[i].id = records[i].id;
        out[i].timestamp = records[i].timestamp;
        out[i].sentiment = score_text(records[i].text, lexicon, rules);
        if (!annotations.empty())
            out[i].conditions = annotations[i];
    });
    return out;
}

std::string scored_csv(std::span<const ScoredTweet> tweets) {
    std::string out = "id,ts,sentiment";
    for (auto v : kVariables)
        out += fmt::format(",{0},z_{0}", to_string(v));
    out += ",region\n";
    for (const auto& t : tweets) {
        out += fmt::format("{},{},{}", csv::quote(t.id), format_timestamp(t.timestamp), csv::number(t.sentiment));
        for (auto v : kVariables)
            out += fmt::format(",{},{}", csv::optional_number(t.conditions[v].raw),
                               csv::optional_number(t.conditions[v].z));
        out += fmt::format(",{}\n", t.region ? csv::quote(*t.region) : "");
    }
    return out;
}

std::vector<ScoredTweet> parse_scored_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("id,ts,sentiment,"))
        throw DataError("scored corpus: bad header");
    const std::size_t fields = 3 + 2 * kVariableCount + 1;
    std::vector<ScoredTweet> out;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        const auto f = csv::split(line);
        if (f.size() != fields)
            throw DataError(fmt::format("scored:{}: expected {} fields, got {}", n, fields, f.size()));
        const auto ctx = fmt::format("scored:{}", n);
        ScoredTweet t;
        t.id = f[0];
        const auto ts = parse_timestamp(f[1]);
        if (!ts)
            throw DataError(fmt::format("{}: bad timestamp", ctx));
        t.timestamp = *ts;
        t.sentiment = csv::parse_double(f[2], ctx);
        for (std::size_t k = 0; k < kVariableCount; ++k) {
            auto& cv = t.conditions.values[k];
            if (!f[3 + 2 * k].empty())
                cv.raw = csv::parse_double(f[3 + 2 * k], ctx);
            if (!f[4 + 2 * k].empty())
                cv.z = csv::parse_double(f[4 + 2 * k], ctx);
        }
        if (!f.back().empty())
            t.region = f.back();
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace wxmood
