#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "wxmood/analytics.hpp"
#include "wxmood/errors.hpp"

using namespace wxmood;

namespace {

ScoredTweet tweet(double sentiment, std::optional<double> tmax_z, std::optional<double> humidity_z = std::nullopt) {
    ScoredTweet t;
    t.sentiment = sentiment;
    t.conditions[Variable::Tmax].z = tmax_z;
    t.conditions[Variable::Tmax].raw = tmax_z ? std::optional<double>(15 + 4 * *tmax_z) : std::nullopt;
    t.conditions[Variable::Humidity].z = humidity_z;
    return t;
}

HexCoord brute_force_cell(const Lattice& lat, double a, double b) {
    HexCoord best{};
    double best_d = INFINITY;
    for (int q = -60; q <= 60; ++q)
        for (int r = -60; r <= 60; ++r) {
            const auto c = lat.center({q, r});
            const double d = (a - c[0]) * (a - c[0]) + (b - c[1]) * (b - c[1]);
            if (d < best_d || (d == best_d && HexCoord{q, r} < best)) {
                best = {q, r};
                best_d = d;
            }
        }
    return best;
}

} // namespace

TEST_CASE("bin edges and indices") {
    const auto e = even_edges(0.0, 3.0, 30);
    REQUIRE(e.size() == 31);
    CHECK(e.back() == 3.0);
    for (std::size_t k = 0; k + 1 < e.size(); ++k)
        CHECK(e[k] < e[k + 1]);
    CHECK(bin_index(e, 0.0) == 0u);
    CHECK(bin_index(e, 0.1) == 1u); // right-open: an inner edge starts the next bin
    CHECK(bin_index(e, 3.0) == 29u); // last bin is closed
    CHECK_FALSE(bin_index(e, -0.01));
    CHECK_FALSE(bin_index(e, 3.01));
    CHECK_FALSE(bin_index(e, std::nan("")));
    CHECK_THROWS_AS(even_edges(0, 1, 0), ConfigError);
}

TEST_CASE("constant sentiment gives a flat curve") {
    std::vector<ScoredTweet> tweets;
    for (int i = 0; i < 1000; ++i)
        tweets.push_back(tweet(0.2, 30.0 * i / 999.0));
    const auto c = bin_response(tweets, Variable::Tmax, Axis::Z);
    CHECK(c.bins.size() == 30);
    CHECK(c.edges.front() == 0.0);
    CHECK(c.edges.back() == 30.0);
    CHECK(c.min_count == 1);
    for (const auto& b : c.bins) {
        CHECK(b.included);
        CHECK(*b.mean == doctest::Approx(0.2).epsilon(1e-12));
    }
}

TEST_CASE("inclusion counts every tweet passed in") {
    // 10,000 tweets, 9,000 without a tmax value; threshold ceil(10) = 10.
    std::vector<ScoredTweet> tweets;
    for (int i = 0; i < 9000; ++i)
        tweets.push_back(tweet(0.0, std::nullopt));
    for (int i = 0; i < 1000; ++i)
        tweets.push_back(tweet(0.1, i < 9 ? 0.0 : (i < 19 ? 1.0 : 3.0)));
    CurveParams p;
    p.bins = 3;
    const auto c = bin_response(tweets, Variable::Tmax, Axis::Z, p);
    CHECK(c.total == 10'000);
    CHECK(c.valid == 1000);
    CHECK(c.min_count == 10);
    CHECK(c.bins[0].count == 9);
    CHECK_FALSE(c.bins[0].included);
    CHECK(c.bins[1].count == 10);
    CHECK(c.bins[1].included);
    CHECK(c.bins[2].count == 981);

    // An empty bin is excluded and has no mean.
    const std::vector<std::optional<double>> values{0.0, 0.0, 3.0};
    const std::vector<double> s{0.1, 0.3, 0.5};
    const auto sparse = bin_values(values, s, even_edges(0, 3, 3), 3, Fraction::from_double(0.001));
    CHECK(sparse.bins[1].count == 0);
    CHECK_FALSE(sparse.bins[1].mean);
    CHECK_FALSE(sparse.bins[1].included);
    CHECK(*sparse.bins[0].mean == doctest::Approx(0.2));
}

TEST_CASE("degenerate and empty curves") {
    std::vector<ScoredTweet> tweets{tweet(0.5, 1.0), tweet(-0.5, 1.0)};
    const auto c = bin_response(tweets, Variable::Tmax, Axis::Z);
    CHECK(c.degenerate);
    REQUIRE(c.bins.size() == 1);
    CHECK(*c.bins[0].mean == 0.0);
    CHECK(c.bins[0].count == 2);

    CHECK_THROWS_AS(bin_response(tweets, Variable::Wind, Axis::Z), DataError);
}

TEST_CASE("curve means equal a group-by and ignore tweet order") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> nd;
    std::vector<ScoredTweet> tweets;
    for (int i = 0; i < 5000; ++i) {
        const double z = nd(rng);
        tweets.push_back(tweet(z > 1.0 ? 0.5 : -0.5, z));
    }
    const auto c = bin_response(tweets, Variable::Tmax, Axis::Z);
    std::map<std::size_t, std::pair<double, std::size_t>> oracle;
    for (const auto& t : tweets) {
        auto& [sum, n] = oracle[*bin_index(c.edges, *t.conditions[Variable::Tmax].z)];
        sum += t.sentiment;
        ++n;
    }
    for (const auto& [k, sn] : oracle) {
        CHECK(c.bins[k].count == sn.second);
        CHECK(*c.bins[k].mean == doctest::Approx(sn.first / sn.second).epsilon(1e-12));
    }
    // Sentiment flips sign across the bin holding z = 1.
    const auto k1 = *bin_index(c.edges, 1.0);
    CHECK(*c.bins[k1 - 1].mean < 0.0);
    CHECK(*c.bins[k1 + 1].mean > 0.0);

    auto shuffled = tweets;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto again = bin_response(shuffled, Variable::Tmax, Axis::Z);
    for (std::size_t k = 0; k < c.bins.size(); ++k) {
        CHECK(again.bins[k].count == c.bins[k].count);
        CHECK(again.bins[k].mean == c.bins[k].mean);
    }
}

TEST_CASE("curve CSV round trip") {
    std::vector<ScoredTweet> tweets;
    for (int i = 0; i < 300; ++i)
        tweets.push_back(tweet(std::sin(i * 0.1), i * 0.013));
    const auto c = bin_response(tweets, Variable::Tmax, Axis::Raw);
    const auto text = curve_csv(c);
    const auto back = parse_curve_csv(text);
    REQUIRE(back.size() == c.bins.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
        CHECK(back[k].center == c.bins[k].center);
        CHECK(back[k].mean == c.bins[k].mean);
        CHECK(back[k].count == c.bins[k].count);
        CHECK(back[k].included == c.bins[k].included);
    }
}

TEST_CASE("hex assignment matches the nearest center") {
    std::mt19937_64 rng(200);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (const Tiling tiling : {Tiling::Hex, Tiling::Rect}) {
        const Lattice lat{tiling, 0.25};
        for (int i = 0; i < 200; ++i) {
            const double a = u(rng), b = u(rng);
            CHECK(lat.cell_of(a, b) == brute_force_cell(lat, a, b));
        }
        // Points exactly on cell centers and on shared edges.
        for (int q = -3; q <= 3; ++q)
            for (int r = -3; r <= 3; ++r) {
                const auto c = lat.center({q, r});
                CHECK(lat.cell_of(c[0], c[1]) == HexCoord{q, r});
                const auto d = lat.center({q + 1, r});
                const double ma = (c[0] + d[0]) / 2, mb = (c[1] + d[1]) / 2;
                CHECK(lat.cell_of(ma, mb) == brute_force_cell(lat, ma, mb));
            }
    }
}

TEST_CASE("pair grid counts and suppression") {
    std::vector<ScoredTweet> tweets;
    for (int i = 0; i < 5; ++i)
        tweets.push_back(tweet(0.1, 0.0, 0.0));
    for (int i = 0; i < 4; ++i)
        tweets.push_back(tweet(-0.3, 2.0, 2.0));
    tweets.push_back(tweet(0.9, 1.0, std::nullopt)); // humidity invalid
    const auto g = pair_grid(tweets, Variable::Tmax, Variable::Humidity);
    CHECK(g.valid == 9);
    REQUIRE(g.cells.size() == 2);
    std::size_t total = 0;
    for (const auto& c : g.cells) {
        total += c.count;
        if (c.count == 5) {
            CHECK_FALSE(c.suppressed);
            CHECK(c.mean == doctest::Approx(0.1));
            CHECK(c.coord == HexCoord{0, 0});
        } else {
            CHECK(c.count == 4);
            CHECK(c.suppressed);
        }
    }
    CHECK(total == g.valid);

    const auto back = parse_pair_grid_csv(pair_grid_csv(g));
    REQUIRE(back.size() == g.cells.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
        CHECK(back[k].coord == g.cells[k].coord);
        CHECK(back[k].mean == g.cells[k].mean);
        CHECK(back[k].count == g.cells[k].count);
        CHECK(back[k].suppressed == g.cells[k].suppressed);
    }

    CHECK_THROWS_AS(pair_grid(tweets, Variable::Wind, Variable::Humidity), DataError);
    PairParams bad;
    bad.lattice.size = 0.0;
    CHECK_THROWS_AS(pair_grid(tweets, Variable::Tmax, Variable::Humidity, bad), ConfigError);
}

TEST_CASE("pair grid totals over random data") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ScoredTweet> tweets;
        const int n = 1 + static_cast<int>(rng() % 2000);
        std::size_t valid = 0;
        for (int i = 0; i < n; ++i) {
            const bool ok = rng() % 5 != 0;
            valid += ok;
            tweets.push_back(tweet(std::tanh(nd(rng)), nd(rng), ok ? std::optional<double>(nd(rng)) : std::nullopt));
        }
        if (valid == 0)
            continue;
        const auto g = pair_grid(tweets, Variable::Tmax, Variable::Humidity);
        std::size_t total = 0;
        for (const auto& c : g.cells) {
            total += c.count;
            CHECK(c.suppressed == (c.count < 5));
            CHECK(c.mean >= -1.0);
            CHECK(c.mean <= 1.0);
        }
        CHECK(total == valid);
    }
}

TEST_CASE("sentiment normalisation") {
    const auto g = normalize_sentiment(std::vector<double>{0.1, 0.3});
    CHECK(g.values[0] == doctest::Approx(-1.0));
    CHECK(g.values[1] == doctest::Approx(1.0));
    CHECK(g.params.sd == doctest::Approx(0.1));

    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd(0.2, 0.3);
    std::vector<double> s(1000);
    for (auto& v : s)
        v = nd(rng);
    const auto once = normalize_sentiment(s);
    const auto ms = mean_sd(once.values);
    CHECK(std::fabs(ms.mean) < 1e-9);
    CHECK(std::fabs(ms.sd - 1.0) < 1e-9);
    const auto twice = normalize_sentiment(once.values);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(std::fabs(twice.values[i] - once.values[i]) < 1e-12);

    CHECK_THROWS_AS(normalize_sentiment(std::vector<double>{0.4, 0.4, 0.4}), DataError);
    CHECK_THROWS_AS(normalize_sentiment(std::vector<double>{0.4}), DataError);
}

TEST_CASE("regional comparison") {
    // Group B repeats group A's z-space response with sentiment x2 and tmax +5.
    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd;
    std::vector<ScoredTweet> tweets;
    std::vector<std::optional<std::string>> groups;
    for (int i = 0; i < 20'000; ++i) {
        const bool b = i % 2;
        const double z = nd(rng);
        const double s = std::tanh(0.3 * z - 0.1 * z * z) * (b ? 0.4 : 0.2) + 0.05 * nd(rng);
        ScoredTweet t;
        t.sentiment = std::clamp(s, -1.0, 1.0);
        t.conditions[Variable::Tmax].z = z;
        t.conditions[Variable::Tmax].raw = 15 + 3 * z + (b ? 5.0 : 0.0);
        tweets.push_back(t);
        groups.push_back(b ? "B" : "A");
    }
    tweets.push_back(tweet(0.0, 0.0));
    groups.push_back(std::nullopt); // ungrouped tweets count only in the denominator
    const auto cmp = regional_compare(tweets, groups, {"A", "B"}, Variable::Tmax);
    CHECK(cmp.groups[0].tweets == 10'000);
    CHECK(cmp.groups[1].tweets == 10'000);
    CHECK(cmp.groups[0].normalized.total == tweets.size());
    CHECK(cmp.groups[0].raw.edges == cmp.groups[1].raw.edges);
    REQUIRE(cmp.raw);
    REQUIRE(cmp.normalized);
    CHECK(cmp.normalized_shared_bins >= 3);
    CHECK(cmp.raw->r < cmp.normalized->r);
    CHECK(cmp.normalized->r >= 0.99);
    CHECK(cmp.normalized->p > 0.0);
    CHECK(cmp.normalized->p <= 1.0);
    CHECK(regional_json(cmp).find("\"normalized\"") != std::string::npos);

    CHECK_THROWS_AS(regional_compare(tweets, groups, {"A", "A"}, Variable::Tmax), ConfigError);
}

TEST_CASE("a single shared bin leaves the correlation undefined") {
    std::vector<ScoredTweet> tweets;
    std::vector<std::optional<std::string>> groups;
    for (int i = 0; i < 10; ++i) {
        tweets.push_back(tweet(0.1 * (i % 3), 0.0));
        groups.push_back("A");
        tweets.push_back(tweet(0.1 * (i % 4), 0.0));
        groups.push_back("B");
    }
    const auto cmp = regional_compare(tweets, groups, {"A", "B"}, Variable::Tmax);
    CHECK(cmp.normalized_shared_bins == 1);
    CHECK_FALSE(cmp.normalized);
    CHECK_FALSE(cmp.raw);
}
