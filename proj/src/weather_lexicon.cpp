#include "wxmood/weather_lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "wxmood/csv.hpp"
#include "wxmood/errors.hpp"
#include "wxmood/tokenize.hpp"

namespace wxmood {

void check_tag_collision(std::span<const TweetRecord> records) {
    for (const auto& r : records)
        for (const auto& t : content_tokens(r.text))
            if (std::find(kTagTokens.begin(), kTagTokens.end(), t) != kTagTokens.end())
                throw TagCollisionError(
                    fmt::format("record '{}' already contains the tag token '{}'; tags must be absent from the corpus",
                                r.id, t));
}

TaggedCorpus tag_percentiles(std::span<const TweetRecord> records, std::span<const ConditionAnnotation> annotations,
                             Variable variable, const TagParams& params) {
    if (annotations.size() != records.size())
        throw DataError("tag_percentiles: annotations are not parallel to the records");
    if (params.bands < 1 || params.bands > 3)
        throw ConfigError("tag_percentiles: bands must be 1..3");
    check_tag_collision(records);

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (annotations[i][variable].z)
            order.push_back(i);
    const std::size_t n = order.size();
    if (n < params.min_records)
        throw DataError(fmt::format("tag_percentiles: {} records with a valid {} z-score, need at least {}", n,
                                    to_string(variable), params.min_records));
    auto z = [&](std::size_t i) { return *annotations[i][variable].z; };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (z(a) != z(b))
            return z(a) > z(b);
        return records[a].id < records[b].id;
    });

    TaggedCorpus out;
    out.variable = variable;
    out.ranked = n;
    out.band_size = static_cast<std::size_t>(params.band.floor_of(static_cast<std::int64_t>(n)));
    out.texts.reserve(records.size());
    for (const auto& r : records)
        out.texts.push_back(r.text);

    const std::size_t b = out.band_size;
    const auto k = static_cast<std::size_t>(params.bands);
    if (2 * k * b > n)
        throw DataError("tag_percentiles: bands overlap");
    for (std::size_t band = 0; band < k; ++band) {
        BandReport rep{fmt::format("top{}", band + 1), b, 0.0};
        for (std::size_t p = band * b; p < (band + 1) * b; ++p)
            out.texts[order[p]] += " " + rep.tag;
        rep.z_threshold = b ? z(order[(band + 1) * b - 1]) : std::nan("");
        out.bands.push_back(rep);
    }
    for (std::size_t band = 0; band < k; ++band) {
        BandReport rep{fmt::format("low{}", band + 1), b, 0.0};
        for (std::size_t p = band * b; p < (band + 1) * b; ++p)
            out.texts[order[n - 1 - p]] += " " + rep.tag;
        rep.z_threshold = b ? z(order[n - (band + 1) * b]) : std::nan("");
        out.bands.push_back(rep);
    }
    return out;
}

Lexicon build_weather_scale(const TaggedCorpus& tagged, GraphParams graph, const PropagationParams& walk,
                            const SeedPair& seeds) {
    for (const auto* side : {&seeds.positive, &seeds.negative})
        for (const auto& [t, w] : side->weights)
            graph.always_keep.insert(t);
    Documents docs;
    docs.reserve(tagged.texts.size());
    for (const auto& t : tagged.texts)
        docs.push_back(content_tokens(t));
    const auto g = build_graph(docs, graph);
    for (const auto* side : {&seeds.positive, &seeds.negative})
        for (const auto& [t, w] : side->weights)
            if (!g.vocabulary().find(t))
                throw DataError(fmt::format("tag token '{}' is missing from the {} graph vocabulary; lower min_count "
                                            "for tags or provide more records",
                                            t, to_string(tagged.variable)));
    auto res = propagate(g, seeds, walk, std::string(to_string(tagged.variable)));
    Lexicon out(res.lexicon.axis());
    for (const auto& [token, score] : res.lexicon.sorted())
        if (std::find(kTagTokens.begin(), kTagTokens.end(), token) == kTagTokens.end())
            out.set(token, score);
    return out;
}

std::vector<ScatterRow> emit_word_scatter(const Lexicon& sentiment, const Lexicon& weather,
                                          const std::unordered_map<std::string, std::size_t>& frequency,
                                          std::size_t min_frequency) {
    std::vector<ScatterRow> rows;
    for (const auto& [token, s] : sentiment.sorted()) {
        if (!weather.contains(token))
            continue;
        const auto it = frequency.find(token);
        const std::size_t f = it == frequency.end() ? 0 : it->second;
        if (f < min_frequency)
            continue;
        rows.push_back({token, s, weather.score(token), f});
    }
    if (rows.empty())
        throw DataError("word scatter: the sentiment and weather lexicons share no token");
    std::stable_sort(rows.begin(), rows.end(), [](const ScatterRow& a, const ScatterRow& b) {
        return std::abs(a.sentiment) * std::abs(a.weather) > std::abs(b.sentiment) * std::abs(b.weather);
    });
    return rows;
}

std::string scatter_csv(std::span<const ScatterRow> rows) {
    std::string out = "token,sentiment,weather,freq\n";
    for (const auto& r : rows)
        out += fmt::format("{},{},{},{}\n", csv::quote(r.token), csv::number(r.sentiment), csv::number(r.weather),
                           r.frequency);
    return out;
}

std::unordered_map<std::string, std::size_t> token_frequencies(std::span<const std::string> texts) {
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& t : texts)
        for (auto& tok : content_tokens(t))
            ++freq[std::move(tok)];
    return freq;
}

} // namespace wxmood
