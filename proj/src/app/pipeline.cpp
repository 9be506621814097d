#include "wxmood/app/pipeline.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "wxmood/analytics.hpp"
#include "wxmood/csv.hpp"
#include "wxmood/errors.hpp"
#include "wxmood/induction.hpp"
#include "wxmood/lexicon.hpp"
#include "wxmood/parallel.hpp"
#include "wxmood/scorer.hpp"
#include "wxmood/tokenize.hpp"
#include "wxmood/weather_lexicon.hpp"

namespace wxmood::app {

namespace {

constexpr const char* kFiltered = "filtered.jsonl";
constexpr const char* kFilterReport = "filter_report.json";
constexpr const char* kRejections = "rejections.tsv";
constexpr const char* kClimatology = "climatology.csv";
constexpr const char* kAnnotations = "annotations.csv";
constexpr const char* kSentiment = "sentiment_lexicon.csv";
constexpr const char* kScored = "scored.csv";
constexpr const char* kRegional = "regional_report.json";

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError(fmt::format("cannot open '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Output of an earlier stage; names the stage to run when it is missing.
std::string read_stage_output(const Config& c, const char* name, const char* producer) {
    const auto path = c.out / name;
    if (!fs::exists(path))
        throw DataError(fmt::format("'{}' not found; run the '{}' stage first", path.string(), producer));
    return read_text(path);
}

void require_path(const fs::path& p, const char* key) {
    if (p.empty())
        throw ConfigError(fmt::format("config: [paths] {} is not set", key));
}

std::vector<TweetRecord> load_filtered(const Config& c) {
    const auto text = read_stage_output(c, kFiltered, "ingest");
    std::istringstream in(text);
    // The filtered file was written by ingest; re-read without a date filter.
    auto parsed = parse_corpus(in, DateRange{Date::min(), Date::max()});
    if (!parsed.rejections.empty())
        throw DataError(fmt::format("'{}' has {} unreadable lines", (c.out / kFiltered).string(),
                                    parsed.rejections.size()));
    return std::move(parsed.records);
}

GridDataset load_dataset(const Config& c) {
    require_path(c.grid_dir, "grid_dir");
    return load_grid_directory(c.grid_dir);
}

SeedPair sentiment_seeds(const Config& c) {
    return c.sentiment_seeds.empty() ? default_sentiment_seeds() : load_seeds(c.sentiment_seeds);
}

SeedPair scale_seeds(const Config& c) {
    return c.scale_seeds.empty() ? default_scale_seeds() : load_seeds(c.scale_seeds);
}

ScoringRules scoring_rules(const Config& c) {
    return c.rules.empty() ? ScoringRules::defaults() : parse_rules_json(read_text(c.rules));
}

std::vector<ScoredTweet> load_scored(const Config& c) { return parse_scored_csv(read_stage_output(c, kScored, "score")); }

std::string curve_name(Variable v, Axis a) { return fmt::format("curves/{}_{}.csv", to_string(v), to_string(a)); }

template <typename E>
[[noreturn]] void rethrow_as(const char* stage, const E& e) {
    throw E(fmt::format("stage '{}' failed: {}", stage, e.what()));
}

std::vector<std::string> run_stage(const char* name, const std::function<std::vector<std::string>()>& fn) {
    spdlog::info("stage {}", name);
    try {
        return fn();
    } catch (const TagCollisionError& e) {
        rethrow_as(name, e);
    } catch (const DataError& e) {
        rethrow_as(name, e);
    } catch (const ConfigError& e) {
        rethrow_as(name, e);
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(fmt::format("stage '{}' failed: {}", name, e.what()), e.residual());
    }
}

} // namespace

FilterResult filter_cascade(std::vector<TweetRecord> records, Fraction high_volume) {
    FilterResult out;
    out.report.parsed = records.size();
    auto hv = filter_high_volume_authors(records, high_volume);
    out.report.after_high_volume = hv.kept.size();
    out.report.removed_authors = std::move(hv.removed);
    auto named = filter_weather_usernames(hv.kept);
    out.report.after_weather_usernames = named.size();
    out.records = filter_structured_reports(named);
    out.report.after_structured_reports = out.records.size();
    return out;
}

std::string filter_report_json(const FilterReport& r) {
    nlohmann::ordered_json j;
    j["lines_read"] = r.lines_read;
    j["rejected"] = r.rejected;
    j["cascade"] = {{"parsed", r.parsed},
                    {"after_high_volume", r.after_high_volume},
                    {"after_weather_usernames", r.after_weather_usernames},
                    {"after_structured_reports", r.after_structured_reports}};
    auto removed = nlohmann::ordered_json::array();
    for (const auto& a : r.removed_authors)
        removed.push_back({{"author", a.author}, {"count", a.count}});
    j["removed_authors"] = std::move(removed);
    return j.dump(2) + "\n";
}

AnnotatedCorpus annotate_corpus(std::span<const TweetRecord> records, const GridDataset& dataset,
                                const Climatology& climatology, const RegionSet* regions, Fraction overlap,
                                unsigned threads) {
    AnnotatedCorpus out;
    auto res = annotate_tweets(records, dataset, climatology, threads);
    out.annotations = std::move(res.annotations);
    out.unusable = res.unusable_records;
    out.regions.resize(records.size());
    if (regions)
        parallel_for(records.size(), threads,
                     [&](std::size_t i) { out.regions[i] = assign_region(records[i].geometry, *regions, overlap); });
    return out;
}

std::string annotations_csv(std::span<const TweetRecord> records, const AnnotatedCorpus& a) {
    std::string out = "id";
    for (auto v : kVariables)
        out += fmt::format(",{0},z_{0}", to_string(v));
    out += ",region\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        out += csv::quote(records[i].id);
        for (auto v : kVariables)
            out += fmt::format(",{},{}", csv::optional_number(a.annotations[i][v].raw),
                               csv::optional_number(a.annotations[i][v].z));
        out += fmt::format(",{}\n", a.regions[i] ? csv::quote(*a.regions[i]) : "");
    }
    return out;
}

AnnotatedCorpus parse_annotations_csv(std::string_view text, std::span<const TweetRecord> records) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("id,tmax,"))
        throw DataError("annotations CSV: bad header");
    AnnotatedCorpus out;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        const auto f = csv::split(line);
        const auto ctx = fmt::format("annotations:{}", n);
        if (f.size() != 2 + 2 * kVariableCount)
            throw DataError(fmt::format("{}: wrong field count", ctx));
        const std::size_t i = out.annotations.size();
        if (i >= records.size() || records[i].id != f[0])
            throw DataError(fmt::format("{}: id '{}' does not match the filtered corpus", ctx, f[0]));
        ConditionAnnotation a;
        for (std::size_t k = 0; k < kVariableCount; ++k) {
            if (!f[1 + 2 * k].empty())
                a.values[k].raw = csv::parse_double(f[1 + 2 * k], ctx);
            if (!f[2 + 2 * k].empty())
                a.values[k].z = csv::parse_double(f[2 + 2 * k], ctx);
        }
        out.unusable += !a.usable();
        out.annotations.push_back(a);
        out.regions.push_back(f.back().empty() ? std::nullopt : std::optional(f.back()));
    }
    if (out.annotations.size() != records.size())
        throw DataError("annotations CSV does not cover the filtered corpus");
    return out;
}

std::vector<std::optional<std::string>> group_labels(std::span<const std::optional<std::string>> names,
                                                     const RegionSet& regions) {
    std::vector<std::optional<std::string>> out;
    out.reserve(names.size());
    for (const auto& n : names)
        out.push_back(n ? regions.group_of(*n) : std::nullopt);
    return out;
}

std::vector<std::string> stage_ingest(const Config& c) {
    require_path(c.corpus, "corpus");
    auto parsed = parse_corpus(c.corpus, c.study);
    auto result = filter_cascade(std::move(parsed.records), Fraction::from_double(c.high_volume_fraction));
    result.report.lines_read = parsed.lines_read;
    result.report.rejected = parsed.rejections.size();
    const auto& r = result.report;
    spdlog::info("ingest: {} lines, {} rejected, cascade {} -> {} -> {} -> {}", r.lines_read, r.rejected, r.parsed,
                 r.after_high_volume, r.after_weather_usernames, r.after_structured_reports);
    std::string lines;
    for (const auto& rec : result.records)
        lines += to_json_line(rec) + "\n";
    csv::write_file(c.out / kFiltered, lines);
    csv::write_file(c.out / kFilterReport, filter_report_json(result.report));
    csv::write_file(c.out / kRejections, format_rejections(parsed.rejections));
    return {kFiltered, kFilterReport, kRejections};
}

std::vector<std::string> stage_climatology(const Config& c) {
    const auto ds = load_dataset(c);
    const auto clim = compute_climatology(ds, c.window, c.min_obs);
    std::size_t unusable = 0;
    for (auto v : kVariables)
        for (std::size_t cell = 0; cell < ds.spec().cell_count(); ++cell)
            unusable += !clim.at(v, cell).usable;
    spdlog::info("climatology: {}-{}, {} unusable (cell, variable) baselines", c.window.start_year,
                 c.window.end_year, unusable);
    csv::write_file(c.out / kClimatology, climatology_csv(clim));
    return {kClimatology};
}

std::vector<std::string> stage_annotate(const Config& c) {
    const auto records = load_filtered(c);
    const auto ds = load_dataset(c);
    const auto clim = parse_climatology_csv(read_stage_output(c, kClimatology, "climatology"), ds.spec());
    std::optional<RegionSet> regions;
    if (!c.regions.empty())
        regions.emplace(load_regions(c.regions));
    const auto a = annotate_corpus(records, ds, clim, regions ? &*regions : nullptr,
                                   Fraction::from_double(c.overlap_fraction), c.threads);
    spdlog::info("annotate: {} records, {} without any usable condition", records.size(), a.unusable);
    csv::write_file(c.out / kAnnotations, annotations_csv(records, a));
    return {kAnnotations};
}

std::vector<std::string> stage_train_sentiment(const Config& c) {
    const auto records = load_filtered(c);
    Documents docs;
    docs.reserve(records.size());
    for (const auto& r : records)
        docs.push_back(content_tokens(r.text));
    auto graph_params = c.graph;
    graph_params.threads = c.threads;
    auto walk = c.walk;
    walk.threads = c.threads;
    const auto graph = build_graph(docs, graph_params);
    const auto res = propagate(graph, sentiment_seeds(c), walk, "sentiment");
    spdlog::info("train-sentiment: {} tokens, {} edges, {} + {} iterations", graph.size(), graph.edge_count(),
                 res.iterations_pos, res.iterations_neg);
    if (!res.dropped_seeds.empty())
        spdlog::info("train-sentiment: seeds not in vocabulary: {}", fmt::join(res.dropped_seeds, ", "));
    if (!res.unreachable.empty())
        spdlog::info("train-sentiment: {} tokens unreachable from any seed scored 0", res.unreachable.size());
    csv::write_file(c.out / kSentiment, lexicon_csv(res.lexicon));
    return {kSentiment};
}

std::vector<std::string> stage_train_scales(const Config& c) {
    const auto records = load_filtered(c);
    const auto ann = parse_annotations_csv(read_stage_output(c, kAnnotations, "annotate"), records);
    const auto seeds = scale_seeds(c);
    check_tag_collision(records);

    std::vector<TaggedCorpus> tagged;
    for (auto v : kVariables)
        tagged.push_back(tag_percentiles(records, ann.annotations, v, c.tags));
    std::vector<std::optional<Lexicon>> scales(kVariableCount);
    parallel_for(kVariableCount, c.threads, [&](std::size_t k) {
        auto graph = c.graph;
        graph.threads = 1;
        scales[k] = build_weather_scale(tagged[k], graph, c.walk, seeds);
    });

    std::optional<Lexicon> sentiment;
    if (fs::exists(c.out / kSentiment))
        sentiment = load_lexicon(c.out / kSentiment);
    std::vector<std::string> texts;
    for (const auto& r : records)
        texts.push_back(r.text);
    const auto freq = token_frequencies(texts);

    std::vector<std::string> written;
    for (std::size_t k = 0; k < kVariableCount; ++k) {
        const auto name = std::string(to_string(kVariables[k]));
        csv::write_file(c.out / "scales" / (name + ".csv"), lexicon_csv(*scales[k]));
        written.push_back("scales/" + name + ".csv");

        nlohmann::ordered_json rep;
        rep["variable"] = name;
        rep["ranked_records"] = tagged[k].ranked;
        rep["band_size"] = tagged[k].band_size;
        auto bands = nlohmann::ordered_json::array();
        for (const auto& b : tagged[k].bands)
            bands.push_back({{"tag", b.tag}, {"count", b.count}, {"z_threshold", b.z_threshold}});
        rep["bands"] = std::move(bands);
        csv::write_file(c.out / "scales" / (name + "_tags.json"), rep.dump(2) + "\n");
        written.push_back("scales/" + name + "_tags.json");

        if (sentiment) {
            const auto rows = emit_word_scatter(*sentiment, *scales[k], freq, c.scatter_min_frequency);
            csv::write_file(c.out / "scales" / (name + "_scatter.csv"), scatter_csv(rows));
            written.push_back("scales/" + name + "_scatter.csv");
        }
    }
    if (!sentiment)
        spdlog::warn("train-scales: no sentiment lexicon yet, word scatter tables skipped");
    spdlog::info("train-scales: {} ranked records per variable, band size {}", tagged[0].ranked,
                 tagged[0].band_size);
    return written;
}

std::vector<std::string> stage_score(const Config& c) {
    const auto records = load_filtered(c);
    const auto ann = parse_annotations_csv(read_stage_output(c, kAnnotations, "annotate"), records);
    const auto lexicon = parse_lexicon_csv(read_stage_output(c, kSentiment, "train-sentiment"));
    auto scored = score_corpus(records, lexicon, scoring_rules(c), ann.annotations, c.threads);
    for (std::size_t i = 0; i < scored.size(); ++i)
        scored[i].region = ann.regions[i];
    spdlog::info("score: {} records", scored.size());
    csv::write_file(c.out / kScored, scored_csv(scored));
    return {kScored};
}

std::vector<std::string> stage_curves(const Config& c) {
    const auto scored = load_scored(c);
    std::vector<std::string> written;
    for (auto v : kVariables)
        for (auto axis : {Axis::Raw, Axis::Z}) {
            bool any = false;
            for (const auto& t : scored)
                any |= (axis == Axis::Raw ? t.conditions[v].raw : t.conditions[v].z).has_value();
            if (!any) {
                spdlog::warn("curves: no valid {} {} values, curve skipped", to_string(v), to_string(axis));
                continue;
            }
            const auto curve = bin_response(scored, v, axis, c.curves);
            const auto name = curve_name(v, axis);
            csv::write_file(c.out / name, curve_csv(curve));
            written.push_back(name);
        }
    return written;
}

std::vector<std::string> stage_pairs(const Config& c) {
    const auto scored = load_scored(c);
    std::vector<std::string> written;
    for (const auto& [a, b] : c.pair_list.empty() ? all_variable_pairs() : c.pair_list) {
        const auto grid = pair_grid(scored, a, b, c.pairs);
        const auto name = fmt::format("pairs/{}_{}.csv", to_string(a), to_string(b));
        csv::write_file(c.out / name, pair_grid_csv(grid));
        written.push_back(name);
        std::size_t kept = 0;
        for (const auto& cell : grid.cells)
            kept += !cell.suppressed;
        spdlog::info("pairs: {}/{}: {} cells, {} kept", to_string(a), to_string(b), grid.cells.size(), kept);
    }
    return written;
}

std::vector<std::string> stage_regions(const Config& c) {
    require_path(c.regions, "regions");
    const auto regions = load_regions(c.regions);
    const auto scored = load_scored(c);
    std::vector<std::optional<std::string>> names;
    for (const auto& t : scored)
        names.push_back(t.region);
    const auto groups = group_labels(names, regions);
    const auto cmp = regional_compare(scored, groups, c.groups, c.compare_variable, c.curves);
    auto fmt_r = [](const std::optional<Correlation>& r) { return r ? fmt::format("{:.3f}", r->r) : "undefined"; };
    spdlog::info("regions: {} vs {} on {}: raw r {}, normalised r {}", c.groups[0], c.groups[1],
                 to_string(c.compare_variable), fmt_r(cmp.raw), fmt_r(cmp.normalized));
    csv::write_file(c.out / kRegional, regional_json(cmp));
    return {kRegional};
}

Manifest run_pipeline(const Config& c) {
    Manifest m;
    auto add = [&](const char* artifact, const std::vector<std::string>& files) {
        for (const auto& f : files)
            (artifact ? m.artifacts[artifact] : m.auxiliary).push_back(digest(c.out, f));
    };
    auto split = [](const std::vector<std::string>& files, const std::string& suffix) {
        std::pair<std::vector<std::string>, std::vector<std::string>> out;
        for (const auto& f : files)
            (f.ends_with(suffix) && f.find('_') == std::string::npos ? out.first : out.second).push_back(f);
        return out;
    };

    add(nullptr, run_stage("ingest", [&] { return stage_ingest(c); }));
    add("climatology", run_stage("climatology", [&] { return stage_climatology(c); }));
    add(nullptr, run_stage("annotate", [&] { return stage_annotate(c); }));
    add("sentiment_lexicon", run_stage("train-sentiment", [&] { return stage_train_sentiment(c); }));
    const auto [scale_files, scale_aux] =
        split(run_stage("train-scales", [&] { return stage_train_scales(c); }), ".csv");
    add("weather_scales", scale_files);
    add(nullptr, scale_aux);
    add("scored_corpus", run_stage("score", [&] { return stage_score(c); }));
    add("curves", run_stage("curves", [&] { return stage_curves(c); }));
    add("pair_grids", run_stage("pairs", [&] { return stage_pairs(c); }));
    add("regional_report", run_stage("regions", [&] { return stage_regions(c); }));

    for (const auto& input : {c.corpus, c.regions, c.sentiment_seeds, c.scale_seeds, c.rules})
        if (!input.empty())
            m.inputs.push_back({input.filename().generic_string(), sha256_file(input)});
    std::vector<fs::path> grid_files;
    for (const auto& e : fs::directory_iterator(c.grid_dir))
        if (e.is_regular_file())
            grid_files.push_back(e.path());
    std::sort(grid_files.begin(), grid_files.end());
    for (const auto& f : grid_files)
        m.inputs.push_back({"grid/" + f.filename().generic_string(), sha256_file(f)});
    m.parameters = config_ini(c);
    csv::write_file(c.out / "manifest.json", manifest_json(m));
    spdlog::info("pipeline: {} artifacts written to {}", m.artifacts.size(), c.out.string());
    return m;
}

} // namespace wxmood::app
