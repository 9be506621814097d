#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wxmood/app/config.hpp"
#include "wxmood/app/manifest.hpp"
#include "wxmood/corpus.hpp"
#include "wxmood/regions.hpp"
#include "wxmood/weather_grid.hpp"

namespace wxmood::app {

struct FilterReport {
    std::size_t lines_read = 0;
    std::size_t rejected = 0;
    std::size_t parsed = 0;
    std::size_t after_high_volume = 0;
    std::size_t after_weather_usernames = 0;
    std::size_t after_structured_reports = 0;
    std::vector<AuthorCount> removed_authors;
};

struct FilterResult {
    std::vector<TweetRecord> records;
    FilterReport report;
};

/// High-volume authors, then weather-named accounts, then unit/phrase reports.
FilterResult filter_cascade(std::vector<TweetRecord> records, Fraction high_volume = Fraction::from_double(0.01));

std::string filter_report_json(const FilterReport& report);

struct AnnotatedCorpus {
    std::vector<ConditionAnnotation> annotations;
    std::vector<std::optional<std::string>> regions; // region name per record
    std::size_t unusable = 0;
};

AnnotatedCorpus annotate_corpus(std::span<const TweetRecord> records, const GridDataset& dataset,
                                const Climatology& climatology, const RegionSet* regions, Fraction overlap,
                                unsigned threads);

/// "id,tmax,z_tmax,...,pressure,z_pressure,region".
std::string annotations_csv(std::span<const TweetRecord> records, const AnnotatedCorpus& annotated);
/// Reads annotations back in the order of `records`; ids must match.
AnnotatedCorpus parse_annotations_csv(std::string_view text, std::span<const TweetRecord> records);

/// Group label (via the region set) for each region name.
std::vector<std::optional<std::string>> group_labels(std::span<const std::optional<std::string>> region_names,
                                                     const RegionSet& regions);

// Subcommand stages. Each reads its inputs from the configured paths and the
// outputs of earlier stages in config.out, and returns the files it wrote
// (relative to config.out).
std::vector<std::string> stage_ingest(const Config& config);
std::vector<std::string> stage_climatology(const Config& config);
std::vector<std::string> stage_annotate(const Config& config);
std::vector<std::string> stage_train_sentiment(const Config& config);
std::vector<std::string> stage_train_scales(const Config& config);
std::vector<std::string> stage_score(const Config& config);
std::vector<std::string> stage_curves(const Config& config);
std::vector<std::string> stage_pairs(const Config& config);
std::vector<std::string> stage_regions(const Config& config);

/// Every stage in dependency order, then manifest.json. A failing stage is
/// reported with its name; the exception type is preserved.
Manifest run_pipeline(const Config& config);

} // namespace wxmood::app
