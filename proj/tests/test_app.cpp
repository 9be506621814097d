#include <doctest.h>

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "wxmood/app/config.hpp"
#include "wxmood/app/manifest.hpp"
#include "wxmood/app/pipeline.hpp"
#include "wxmood/app/synth.hpp"
#include "wxmood/errors.hpp"
#include "wxmood/lexicon.hpp"
#include "wxmood/scorer.hpp"

using namespace wxmood;
using namespace wxmood::app;
using wxmood::test::scratch;

namespace {

SynthParams small_synth(std::uint64_t seed = 7) {
    SynthParams p;
    p.seed = seed;
    p.tweets = 1500;
    return p;
}

} // namespace

TEST_CASE("config parsing") {
    const auto c = parse_config(R"(
; demo
[paths]
corpus = data/corpus.jsonl
out = /tmp/elsewhere

[study]
start = 2021-03-01
end = 2021-09-30

[lexicon]
min_count = 4
walk_continue = 0.9

[pairs]
tiling = rect
pairs = tmax:humidity, wind:precip

[run]
seed = 12
)",
                                "/base");
    CHECK(c.corpus == std::filesystem::path("/base/data/corpus.jsonl"));
    CHECK(c.out == std::filesystem::path("/tmp/elsewhere"));
    CHECK(format_date(c.study.first) == "2021-03-01");
    CHECK(c.graph.min_count == 4);
    CHECK(c.graph.k_neighbors == 25);
    CHECK(c.walk.beta == 0.9);
    CHECK(c.pairs.lattice.tiling == Tiling::Rect);
    REQUIRE(c.pair_list.size() == 2);
    CHECK(c.pair_list[1] == std::pair{Variable::Wind, Variable::Precip});
    CHECK(c.seed == 12);

    // Defaults carry the standard thresholds.
    const Config d;
    CHECK(d.high_volume_fraction == 0.01);
    CHECK(d.curves.bins == 30);
    CHECK(d.curves.min_fraction == Fraction::from_double(0.001));
    CHECK(d.pairs.min_count == 5);
    CHECK(d.tags.band == Fraction::from_double(0.01));
    CHECK(d.window.start_year == 2011);
    CHECK(d.window.end_year == 2020);

    CHECK_THROWS_AS(parse_config("[paths]\ncorpse = x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nonsense]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[curves]\nbins = many\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[curves]\nbins = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[lexicon]\nwalk_continue = 1.0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[study]\nstart = 2021-05-01\nend = 2021-04-01\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[pairs]\npairs = tmax:tmax\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/no/such/config.ini"), ConfigError);
    CHECK(all_variable_pairs().size() == 10);
}

TEST_CASE("canonical parameters round trip") {
    Config c;
    c.graph.min_count = 7;
    c.curves.bins = 12;
    c.pair_list = {{Variable::Tmax, Variable::Wind}};
    c.groups = {"Up", "Down"};
    const auto text = config_ini(c);
    const auto back = parse_config(text);
    CHECK(config_ini(back) == text);
    CHECK(back.graph.min_count == 7);
    CHECK(back.groups[1] == "Down");
    // Thread count does not change results and is not part of the parameters.
    c.threads = 8;
    CHECK(config_ini(c) == text);
}

TEST_CASE("hashes and manifests") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

    const auto dir = scratch("manifest");
    std::ofstream(dir / "x.txt") << "abc";
    const auto d = digest(dir, "x.txt");
    CHECK(d.path == "x.txt");
    CHECK(d.sha256 == sha256_hex("abc"));
    CHECK_THROWS(digest(dir, "missing.txt"));

    Manifest m;
    m.artifacts["lexicon"].push_back(d);
    m.inputs.push_back({"corpus.jsonl", sha256_hex("")});
    m.parameters = "[run]\nseed = 1\n";
    const auto text = manifest_json(m);
    CHECK(text == manifest_json(m));
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("artifacts").at("lexicon").at(0).at("sha256") == d.sha256);
    CHECK(j.at("version") == std::string(kVersion));
}

TEST_CASE("planted response") {
    const SynthParams p;
    CHECK(planted_response(p, 1.5) == doctest::Approx(0.6));
    CHECK(planted_response(p, -2.0) == doctest::Approx(-0.6));
    CHECK(planted_response(p, 3.0) == doctest::Approx(-0.6));
    CHECK(planted_response(p, -4.0) == doctest::Approx(-0.6));
    for (double z = -3.0; z <= 4.0; z += 0.05)
        CHECK(planted_response(p, z) <= planted_response(p, 1.5));
    SynthParams flat = p;
    flat.response_scale = 0.0;
    CHECK(planted_response(flat, 1.5) == planted_response(flat, -1.0));
}

TEST_CASE("synthetic generation is deterministic per seed") {
    const auto a = generate_synthetic(small_synth());
    const auto b = generate_synthetic(small_synth());
    const auto c = generate_synthetic(small_synth(8));
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].id == b.records[i].id);
        CHECK(a.records[i].text == b.records[i].text);
        CHECK(a.records[i].timestamp == b.records[i].timestamp);
    }
    CHECK(a.ground_truth == b.ground_truth);
    CHECK(a.ground_truth != c.ground_truth);
    CHECK(a.regions.size() == 8);

    const auto gt = nlohmann::json::parse(a.ground_truth);
    CHECK(gt.contains("top_only_token"));

    const auto d1 = scratch("synth_a"), d2 = scratch("synth_b");
    write_synthetic(a, d1);
    write_synthetic(b, d2);
    for (const auto& e : std::filesystem::recursive_directory_iterator(d1)) {
        if (!e.is_regular_file())
            continue;
        const auto rel = std::filesystem::relative(e.path(), d1);
        CHECK(sha256_file(e.path()) == sha256_file(d2 / rel));
    }
    CHECK(std::filesystem::exists(d1 / "wxmood.ini"));
    CHECK(std::filesystem::exists(d1 / "grid" / "grid.json"));
    CHECK_NOTHROW(load_config(d1 / "wxmood.ini"));
}

TEST_CASE("ingest stage writes the filter report") {
    const auto dir = scratch("ingest_stage");
    Config c;
    c.corpus = test::data_dir() / "cascade_100.jsonl";
    c.out = dir;
    const auto written = stage_ingest(c);
    CHECK(std::find(written.begin(), written.end(), "filtered.jsonl") != written.end());
    std::ifstream in(dir / "filter_report.json");
    const auto report = nlohmann::json::parse(in);
    CHECK(report.at("cascade").at("parsed") == 100);
    CHECK(report.at("cascade").at("after_structured_reports") == 87);
}

TEST_CASE("pipeline reports missing inputs by name") {
    const auto dir = scratch("pipeline_missing");
    write_synthetic(generate_synthetic(small_synth()), dir);
    auto c = load_config(dir / "wxmood.ini");
    c.out = dir / "out";
    c.grid_dir = dir / "no_grid_here";
    try {
        run_pipeline(c);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string what = e.what();
        CHECK(what.find("no_grid_here") != std::string::npos);
        CHECK(what.find("climatology") != std::string::npos);
    }

    // A stage run before its predecessor names the missing stage.
    Config fresh = c;
    fresh.out = scratch("pipeline_order");
    CHECK_THROWS_WITH_AS(stage_score(fresh), doctest::Contains("first"), DataError);
}

TEST_CASE("annotations round trip") {
    const auto ds = test::grid_fixture();
    const auto clim = compute_climatology(ds, YearWindow{2019, 2020});
    std::vector<TweetRecord> recs{test::make_record("a", "x", "u", LonLat{-3.9, 55.1}),
                                  test::make_record("b", "x", "u", BBox{-3.8, 55.0, -3.4, 55.6}),
                                  test::make_record("c", "x", "u", LonLat{-3.9, 55.1})};
    recs[2].timestamp = *parse_timestamp("2030-01-01T00:00:00Z"); // outside the grid
    const auto ann = annotate_corpus(recs, ds, clim, nullptr, Fraction::from_double(0.5), 2);
    CHECK(ann.unusable == 1);
    const auto text = annotations_csv(recs, ann);
    const auto back = parse_annotations_csv(text, recs);
    REQUIRE(back.annotations.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (Variable v : kVariables) {
            CHECK(back.annotations[i][v].raw == ann.annotations[i][v].raw);
            CHECK(back.annotations[i][v].z == ann.annotations[i][v].z);
        }
    CHECK(annotations_csv(recs, back) == text);

    std::swap(recs[0], recs[1]);
    CHECK_THROWS_AS(parse_annotations_csv(text, recs), DataError);
}

TEST_CASE("shipped seed and rule files match the built-in defaults") {
    const auto root = test::data_dir().parent_path().parent_path() / "data";
    CHECK(seeds_json(load_seeds(root / "seeds" / "sentiment_seeds.json")) == seeds_json(default_sentiment_seeds()));
    CHECK(seeds_json(load_seeds(root / "seeds" / "scale_seeds.json")) == seeds_json(default_scale_seeds()));
    std::ifstream in(root / "rules.json");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(rules_json(parse_rules_json(text)) == rules_json(ScoringRules::defaults()));
}
