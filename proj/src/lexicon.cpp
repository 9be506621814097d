#include "wxmood/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "wxmood/csv.hpp"
#include "wxmood/errors.hpp"

namespace wxmood {

void Lexicon::set(std::string token, double score) {
    if (!std::isfinite(score) || score < -1.0 || score > 1.0)
        throw std::invalid_argument(fmt::format("lexicon score {} for '{}' outside [-1, 1]", score, token));
    scores_.insert_or_assign(std::move(token), score);
}

bool Lexicon::contains(std::string_view token) const { return scores_.find(token) != scores_.end(); }

double Lexicon::score(std::string_view token) const {
    auto it = scores_.find(token);
    return it == scores_.end() ? 0.0 : it->second;
}

std::vector<std::pair<std::string, double>> Lexicon::sorted() const {
    std::vector<std::pair<std::string, double>> out(scores_.begin(), scores_.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::string lexicon_csv(const Lexicon& lexicon) {
    std::string out = fmt::format("# axis: {}\ntoken,score\n", lexicon.axis());
    for (const auto& [token, score] : lexicon.sorted())
        out += fmt::format("{},{}\n", csv::quote(token), csv::number(score));
    return out;
}

Lexicon parse_lexicon_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line.rfind("# axis: ", 0) != 0)
        throw DataError("lexicon CSV: missing '# axis:' comment line");
    Lexicon lex(line.substr(8));
    if (!std::getline(in, line) || line != "token,score")
        throw DataError("lexicon CSV: bad header");
    std::size_t n = 2;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        const auto f = csv::split(line);
        if (f.size() != 2)
            throw DataError(fmt::format("lexicon:{}: expected 2 fields", n));
        const double score = csv::parse_double(f[1], fmt::format("lexicon:{}", n));
        if (!std::isfinite(score) || score < -1.0 || score > 1.0)
            throw DataError(fmt::format("lexicon:{}: score outside [-1, 1]", n));
        lex.set(f[0], score);
    }
    return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError(fmt::format("cannot open lexicon '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_lexicon_csv(buf.str());
}

void validate(const SeedPair& seeds) {
    for (const auto* side : {&seeds.positive, &seeds.negative})
        for (const auto& [token, w] : side->weights)
            if (!std::isfinite(w) || w <= 0.0)
                throw ConfigError(fmt::format("seed '{}' has non-positive weight {}", token, w));
    for (const auto& [token, w] : seeds.positive.weights)
        if (seeds.negative.weights.contains(token))
            throw ConfigError(fmt::format("seed '{}' appears on both sides", token));
}

namespace {

SeedSet parse_side(const nlohmann::json& node, const char* name) {
    SeedSet side;
    if (node.is_array()) {
        for (const auto& t : node) {
            if (!t.is_string())
                throw ConfigError(fmt::format("seed list '{}' must hold strings", name));
            side.weights[t.get<std::string>()] = 1.0;
        }
    } else if (node.is_object()) {
        for (const auto& [token, w] : node.items()) {
            if (!w.is_number())
                throw ConfigError(fmt::format("seed '{}' weight must be a number", token));
            side.weights[token] = w.get<double>();
        }
    } else {
        throw ConfigError(fmt::format("seed side '{}' must be an object or array", name));
    }
    return side;
}

} // namespace

SeedPair parse_seeds_json(std::string_view text) {
    auto doc = nlohmann::json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("positive") || !doc.contains("negative"))
        throw ConfigError("seed file needs 'positive' and 'negative' entries");
    SeedPair seeds{parse_side(doc["positive"], "positive"), parse_side(doc["negative"], "negative")};
    validate(seeds);
    return seeds;
}

SeedPair load_seeds(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot open seed file '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_seeds_json(buf.str());
}

std::string seeds_json(const SeedPair& seeds) {
    nlohmann::ordered_json doc;
    doc["positive"] = nlohmann::ordered_json::object();
    doc["negative"] = nlohmann::ordered_json::object();
    for (const auto& [t, w] : seeds.positive.weights)
        doc["positive"][t] = w;
    for (const auto& [t, w] : seeds.negative.weights)
        doc["negative"][t] = w;
    return doc.dump(2) + "\n";
}

SeedPair default_sentiment_seeds() {
    SeedPair seeds;
    for (const char* t : {"lovely", "excellent", "fortunate", "pleasant", "delightful", "perfect", "loved", "love",
                          "loves", "good", "beautiful", "great", "enjoy", "gorgeous", "awesome", "nice", "amazing",
                          "excited"})
        seeds.positive.weights[t] = 1.0;
    for (const char* t : {"bad", "horrible", "hate", "damn", "shit", "shitty", "fuck", "hell", "wtf", "hated",
                          "stupid", "terrible", "awful", "sad", "crap", "crappy", "nasty", "worst", "bitch", "hates"})
        seeds.negative.weights[t] = 1.0;
    return seeds;
}

SeedPair default_scale_seeds() {
    SeedPair seeds;
    seeds.positive.weights = {{"top1", 3.0}, {"top2", 2.0}, {"top3", 1.0}};
    seeds.negative.weights = {{"low1", 3.0}, {"low2", 2.0}, {"low3", 1.0}};
    return seeds;
}

} // namespace wxmood
