#include <doctest.h>

#include <cmath>
#include <fstream>

#include "support.hpp"
#include "wxmood/errors.hpp"
#include "wxmood/weather_grid.hpp"

using namespace wxmood;
using wxmood::test::grid_fixture;
using wxmood::test::scratch;

namespace {

Date day(const char* s) { return *parse_date(s); }

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* kSpec2x2 = R"({"lat_origin": 50, "lon_origin": 0, "dlat": 1, "dlon": 1, "n_lat": 2, "n_lon": 2})";

std::string grid_rows_2x2(int days, bool one_missing) {
    std::string out = "date,variable,lat_idx,lon_idx,value\n";
    for (int d = 1; d <= days; ++d)
        for (Variable v : kVariables)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const bool missing = one_missing && d == 2 && v == Variable::Wind && i == 1 && j == 0;
                    out += "2021-01-0" + std::to_string(d) + "," + std::string(to_string(v)) + "," +
                           std::to_string(i) + "," + std::to_string(j) + "," +
                           (missing ? std::string() : std::to_string(10 + d + i + j)) + "\n";
                }
    return out;
}

} // namespace

TEST_CASE("annotated z-scores match a brute-force recomputation") {
    const GridDataset ds = grid_fixture();
    const auto clim = compute_climatology(ds, YearWindow{2019, 2020});
    const GridSpec& spec = ds.spec();

    std::vector<TweetRecord> recs;
    for (Date d = day("2021-01-01"); d <= day("2021-12-31"); d += std::chrono::days{1})
        for (int i = 0; i < spec.n_lat; ++i)
            for (int j = 0; j < spec.n_lon; ++j) {
                TweetRecord r;
                r.id = std::to_string(recs.size());
                r.timestamp = std::chrono::sys_seconds{d.time_since_epoch()} + std::chrono::hours{12};
                r.geometry = LonLat{spec.node_lon(j), spec.node_lat(i)};
                recs.push_back(r);
            }
    REQUIRE(recs.size() == 16 * 365);
    const auto result = annotate_tweets(recs, ds, clim, 4);
    CHECK(result.unusable_records == 0);
    CHECK(result.records_not_after_window == 0);

    double worst = 0.0;
    std::size_t checked = 0;
    for (Variable v : kVariables) {
        for (std::size_t cell = 0; cell < spec.cell_count(); ++cell) {
            long double sum = 0, ss = 0;
            int n = 0;
            for (Date d = day("2019-01-01"); d <= day("2020-12-31"); d += std::chrono::days{1}) {
                sum += *ds.value(v, d, cell);
                ++n;
            }
            const long double mu = sum / n;
            for (Date d = day("2019-01-01"); d <= day("2020-12-31"); d += std::chrono::days{1})
                ss += (*ds.value(v, d, cell) - mu) * (*ds.value(v, d, cell) - mu);
            const long double sigma = std::sqrt(ss / n);
            for (std::size_t k = cell; k < recs.size(); k += spec.cell_count()) {
                const auto& cv = result.annotations[k][v];
                REQUIRE(cv.z);
                const double x = *ds.value(v, date_of(recs[k].timestamp), cell);
                CHECK(*cv.raw == x);
                worst = std::max(worst, static_cast<double>(std::fabs(*cv.z - (x - mu) / sigma)));
                ++checked;
            }
        }
    }
    CHECK(checked == 16 * 365 * 5);
    CHECK(worst < 1e-9);
}

TEST_CASE("climatology cells") {
    const GridSpec spec{50, 0, 1, 1, 1, 3};
    GridDataset ds(spec, day("2015-01-01"), day("2015-01-02"));
    ds.set_field({day("2015-01-01"), Variable::Tmax, {8, 10, std::nan("")}});
    ds.set_field({day("2015-01-02"), Variable::Tmax, {12, 10, std::nan("")}});

    const auto clim = compute_climatology(ds, YearWindow{2015, 2015}, 2);
    CHECK(clim.at(Variable::Tmax, 0).mu == 10.0);
    CHECK(clim.at(Variable::Tmax, 0).sigma == 2.0);
    CHECK(clim.at(Variable::Tmax, 0).usable);
    // Constant: sigma 0, unusable.
    CHECK(clim.at(Variable::Tmax, 1).sigma == 0.0);
    CHECK_FALSE(clim.at(Variable::Tmax, 1).usable);
    // All missing.
    CHECK(clim.at(Variable::Tmax, 2).n_obs == 0);
    CHECK_FALSE(clim.at(Variable::Tmax, 2).usable);
    // Below the observation floor.
    CHECK_FALSE(compute_climatology(ds, YearWindow{2015, 2015}, 3).at(Variable::Tmax, 0).usable);

    CHECK_THROWS_AS(compute_climatology(ds, YearWindow{2000, 2001}), DataError);
    CHECK_THROWS_AS(compute_climatology(ds, YearWindow{2016, 2015}), ConfigError);
}

TEST_CASE("climatology ignores field order and follows shifts") {
    const GridDataset ds = grid_fixture();
    const GridSpec& spec = ds.spec();
    GridDataset reversed(spec, ds.first_date(), ds.last_date());
    GridDataset shifted(spec, ds.first_date(), ds.last_date());
    for (Date d = ds.last_date(); d >= ds.first_date(); d -= std::chrono::days{1})
        for (Variable v : kVariables)
            for (std::size_t c = 0; c < spec.cell_count(); ++c) {
                reversed.set_value(v, d, c, *ds.value(v, d, c));
                shifted.set_value(v, d, c, *ds.value(v, d, c) + (v == Variable::Tmax ? 7.5 : 0.0));
            }
    const YearWindow w{2019, 2020};
    const auto a = compute_climatology(ds, w);
    const auto b = compute_climatology(reversed, w);
    const auto s = compute_climatology(shifted, w);
    for (Variable v : kVariables)
        for (std::size_t c = 0; c < spec.cell_count(); ++c) {
            CHECK(a.at(v, c).mu == doctest::Approx(b.at(v, c).mu).epsilon(1e-13));
            CHECK(a.at(v, c).sigma == doctest::Approx(b.at(v, c).sigma).epsilon(1e-12));
        }
    for (std::size_t c = 0; c < spec.cell_count(); ++c) {
        CHECK(s.at(Variable::Tmax, c).mu == doctest::Approx(a.at(Variable::Tmax, c).mu + 7.5).epsilon(1e-13));
        CHECK(s.at(Variable::Tmax, c).sigma == doctest::Approx(a.at(Variable::Tmax, c).sigma).epsilon(1e-10));
        const LonLat p{spec.node_lon(static_cast<int>(c % 4)), spec.node_lat(static_cast<int>(c / 4))};
        const auto za = annotate(p, day("2021-07-04"), ds, a)[Variable::Tmax].z;
        const auto zs = annotate(p, day("2021-07-04"), shifted, s)[Variable::Tmax].z;
        CHECK(*zs == doctest::Approx(*za).epsilon(1e-9));
    }
}

TEST_CASE("z_score") {
    CHECK(*z_score(5.0, 5.0, 2.0) == 0.0);
    CHECK(*z_score(9.0, 5.0, 2.0) == 2.0);
    CHECK_FALSE(z_score(1.0, 1.0, 0.0));
    CHECK_FALSE(z_score(1.0, 1.0, -1.0));
    // A cell where mu + 2 sigma = 22.37 C.
    const double mu = 15.87, sigma = 3.25;
    CHECK(*z_score(22.37, mu, sigma) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("conditions at points and boxes") {
    const GridSpec spec{50, 0, 1, 1, 2, 2};
    GridDataset ds(spec, day("2021-01-01"), day("2021-01-01"));
    // cells: (0,0)=10 (0,1)=14 (1,0)=20 (1,1)=30
    ds.set_field({day("2021-01-01"), Variable::Tmax, {10, 14, 20, 30}});
    const Date d = day("2021-01-01");

    CHECK(*conditions_at(LonLat{1, 51}, d, ds)[0] == 30.0);
    CHECK(*conditions_at(BBox{-0.1, 49.9, 1.1, 50.1}, d, ds)[0] == 12.0);
    // Covers no node: nearest to the center (0.8, 50.3) is (0,1).
    CHECK(*conditions_at(BBox{0.7, 50.2, 0.9, 50.4}, d, ds)[0] == 14.0);
    CHECK(conditions_at(BBox{0.3, 50.7, 0.3, 50.7}, d, ds) == conditions_at(LonLat{0.3, 50.7}, d, ds));
    // Variables with no field and dates outside the dataset are invalid.
    CHECK_FALSE(conditions_at(LonLat{0, 50}, d, ds)[index_of(Variable::Wind)]);
    for (const auto& v : conditions_at(LonLat{0, 50}, day("2021-01-02"), ds))
        CHECK_FALSE(v);
}

TEST_CASE("an unusable baseline invalidates one variable only") {
    const GridSpec spec{50, 0, 1, 1, 1, 1};
    GridDataset ds(spec, day("2020-01-01"), day("2021-01-01"));
    for (Date d = ds.first_date(); d <= ds.last_date(); d += std::chrono::days{1}) {
        const double k = static_cast<double>((d - ds.first_date()).count() % 7);
        ds.set_value(Variable::Tmax, d, 0, 10 + k);
        ds.set_value(Variable::Precip, d, 0, k);
        ds.set_value(Variable::Wind, d, 0, 5 + k);
        ds.set_value(Variable::Humidity, d, 0, 70 + k);
        ds.set_value(Variable::Pressure, d, 0, 1013.0); // constant: sigma 0
    }
    const auto clim = compute_climatology(ds, YearWindow{2020, 2020});
    const auto ann = annotate(LonLat{0, 50}, day("2021-01-01"), ds, clim);
    CHECK(ann.usable());
    for (Variable v : kVariables) {
        CHECK(ann[v].raw);
        CHECK(ann[v].z.has_value() == (v != Variable::Pressure));
    }
}

TEST_CASE("seasonal aggregation over region cells") {
    // Two rows: the northern row averages 18.71 C over summer, the southern 20.88 C.
    const GridSpec spec{50, 0, 1, 1, 2, 2};
    GridDataset ds(spec, day("2021-01-01"), day("2021-12-31"));
    for (Date d = ds.first_date(); d <= ds.last_date(); d += std::chrono::days{1}) {
        const double wiggle = ((d - ds.first_date()).count() % 2 == 0) ? 1.5 : -1.5;
        ds.set_field({d, Variable::Tmax, {20.88 + wiggle, 20.88 - wiggle, 18.71 - wiggle, 18.71 + wiggle}});
    }
    const std::vector<std::size_t> south{0, 1}, north{2, 3};
    const std::vector<unsigned> summer{6, 7, 8};
    CHECK(*seasonal_mean(ds, Variable::Tmax, north, summer) == doctest::Approx(18.71).epsilon(1e-12));
    CHECK(*seasonal_mean(ds, Variable::Tmax, south, summer, 2021) == doctest::Approx(20.88).epsilon(1e-12));
    CHECK_FALSE(seasonal_mean(ds, Variable::Tmax, south, summer, 2020));
    CHECK_FALSE(seasonal_mean(ds, Variable::Wind, south, summer));

    const Region top{"Top", "N", {PolygonPart{{{-0.5, 50.5}, {1.5, 50.5}, {1.5, 51.5}, {-0.5, 51.5}}, {}}}};
    CHECK(cells_in_region(spec, top) == north);
}

TEST_CASE("grid files") {
    const auto dir = scratch("grid_files");
    write(dir / "grid.json", kSpec2x2);
    write(dir / "a.csv", grid_rows_2x2(3, true));
    const auto ds = load_grid_directory(dir);
    CHECK(ds.field_count() == 15);
    CHECK(ds.day_count() == 3);
    CHECK(ds.gaps().empty());
    CHECK_FALSE(ds.value(Variable::Wind, day("2021-01-02"), 2));
    CHECK(ds.value(Variable::Wind, day("2021-01-02"), 3) == 14.0);
    CHECK(ds.coverage(Variable::Wind) == doctest::Approx(11.0 / 12.0));
    CHECK(ds.coverage(Variable::Tmax) == 1.0);

    // Round trip through the writer.
    const auto again_dir = scratch("grid_files_again");
    write(again_dir / "grid.json", grid_spec_json(ds.spec()));
    write(again_dir / "all.csv", grid_csv(ds));
    const auto again = load_grid_directory(again_dir);
    CHECK(again.spec() == ds.spec());
    for (Variable v : kVariables)
        for (std::size_t c = 0; c < 4; ++c)
            CHECK(again.value(v, day("2021-01-03"), c) == ds.value(v, day("2021-01-03"), c));

    // A second file with its own, different spec.
    write(dir / "b.grid.json", R"({"lat_origin": 50, "lon_origin": 0, "dlat": 1, "dlon": 0.5, "n_lat": 2, "n_lon": 2})");
    write(dir / "b.csv", "date,variable,lat_idx,lon_idx,value\n2021-01-04,tmax,0,0,1\n");
    CHECK_THROWS_AS(load_grid_directory(dir), DataError);

    const auto bad = scratch("grid_files_bad");
    write(bad / "grid.json", kSpec2x2);
    write(bad / "a.csv", "date,variable,lat_idx,lon_idx,value\n2021-01-01,sunshine,0,0,1\n");
    CHECK_THROWS_AS(load_grid_directory(bad), DataError);
    write(bad / "a.csv", "date,variable,lat_idx,lon_idx,value\n2021-01-01,humidity,0,0,130\n");
    CHECK_THROWS_AS(load_grid_directory(bad), DataError);

    CHECK_THROWS_AS(load_grid_directory(dir / "nope"), DataError);
    CHECK_THROWS_AS(parse_grid_spec(R"({"lat_origin": 0, "lon_origin": 0, "dlat": 0, "n_lat": 1, "n_lon": 1})"),
                    DataError);
}

TEST_CASE("climatology CSV round trip") {
    const GridDataset ds = grid_fixture();
    auto clim = compute_climatology(ds, YearWindow{2019, 2020}, 500);
    const auto text = climatology_csv(clim);
    const auto back = parse_climatology_csv(text, ds.spec());
    CHECK(back.window().start_year == 2019);
    CHECK(back.window().end_year == 2020);
    CHECK(back.min_obs() == 500);
    for (Variable v : kVariables)
        for (std::size_t c = 0; c < ds.spec().cell_count(); ++c) {
            CHECK(back.at(v, c).mu == clim.at(v, c).mu);
            CHECK(back.at(v, c).sigma == clim.at(v, c).sigma);
            CHECK(back.at(v, c).n_obs == clim.at(v, c).n_obs);
            CHECK(back.at(v, c).usable == clim.at(v, c).usable);
        }
    CHECK(climatology_csv(back) == text);
}
