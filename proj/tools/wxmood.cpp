// wxmood: weather and sentiment pipeline driver.
//
//   wxmood synth --out demo --seed 1
//   wxmood pipeline --config demo/wxmood.ini
//
// Exit codes: 0 ok, 1 usage or config, 2 data, 3 non-convergence.

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "wxmood/app/config.hpp"
#include "wxmood/app/pipeline.hpp"
#include "wxmood/app/synth.hpp"
#include "wxmood/errors.hpp"

namespace {

using namespace wxmood;
using namespace wxmood::app;

struct GlobalFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<unsigned> threads;
    bool quiet = false;
};

Config resolve(const GlobalFlags& g) {
    Config c = g.config.empty() ? Config{} : load_config(g.config);
    if (g.seed) {
        c.seed = *g.seed;
        c.synth.seed = *g.seed;
    }
    if (!g.out.empty())
        c.out = g.out;
    if (g.threads)
        c.threads = *g.threads;
    return c;
}

int report(int code, const char* kind, const std::exception& e) {
    std::cerr << fmt::format("wxmood: {}: {}\n", kind, e.what());
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weather-conditioned sentiment analysis of geotagged posts"};
    app.require_subcommand(1);
    GlobalFlags g;
    app.add_option("--config", g.config, "Run configuration (INI)");
    app.add_option("--seed", g.seed, "Seed for the synthetic generator");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
    app.add_flag("-q,--quiet", g.quiet, "Only log warnings and errors");

    std::function<void()> action;
    auto stage = [&](const char* name, const char* help, auto fn) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->callback([&g, &action, fn, name] {
            action = [&g, fn, name] {
                const auto written = fn(resolve(g));
                spdlog::info("{}: wrote {} file(s)", name, written.size());
            };
        });
    };
    stage("ingest", "Parse and filter the corpus", stage_ingest);
    stage("climatology", "Per-cell baselines over the reference window", stage_climatology);
    stage("annotate", "Attach raw and z-scored weather to each record", stage_annotate);
    stage("train-sentiment", "Induce the sentiment lexicon", stage_train_sentiment);
    stage("train-scales", "Induce one weather scale per variable", stage_train_scales);
    stage("score", "Score every record", stage_score);
    stage("curves", "Binned response curves", stage_curves);
    stage("pairs", "Two-variable lattice grids", stage_pairs);
    stage("regions", "Compare the two region groups", stage_regions);

    auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write manifest.json");
    pipeline->fallthrough();
    pipeline->callback([&] { action = [&] { run_pipeline(resolve(g)); }; });

    std::optional<std::size_t> tweets;
    auto* synth = app.add_subcommand("synth", "Write a synthetic corpus, grid, regions and config");
    synth->fallthrough();
    synth->add_option("--tweets", tweets, "Genuine tweets before noise records");
    synth->callback([&] {
        action = [&] {
            Config c = resolve(g);
            if (tweets)
                c.synth.tweets = *tweets;
            const fs::path dir = g.out.empty() ? fs::path("synthetic") : fs::path(g.out);
            const auto data = generate_synthetic(c.synth);
            write_synthetic(data, dir);
            spdlog::info("synth: {} records ({} genuine) written to {}", data.records.size(), c.synth.tweets,
                         dir.string());
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(g.quiet ? spdlog::level::warn : spdlog::level::info);
    try {
        action();
    } catch (const ConfigError& e) {
        return report(1, "config error", e);
    } catch (const DataError& e) {
        return report(2, "data error", e);
    } catch (const ConvergenceError& e) {
        return report(3, "did not converge", e);
    } catch (const std::filesystem::filesystem_error& e) {
        return report(2, "data error", e);
    } catch (const std::exception& e) {
        return report(2, "error", e);
    }
    return 0;
}
