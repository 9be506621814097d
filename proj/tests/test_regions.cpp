#include <doctest.h>

#include <random>

#include "wxmood/errors.hpp"
#include "wxmood/geometry.hpp"
#include "wxmood/regions.hpp"

using namespace wxmood;

namespace {

Ring square(double lon0, double lat0, double side) {
    return {{lon0, lat0}, {lon0 + side, lat0}, {lon0 + side, lat0 + side}, {lon0, lat0 + side}};
}

Region region(std::string name, std::string group, Ring outer) {
    return Region{std::move(name), std::move(group), {PolygonPart{std::move(outer), {}}}};
}

// Two unit squares side by side, sharing the lon = 1 border.
RegionSet west_east() {
    return RegionSet({region("West", "A", square(0, 50, 1)), region("East", "B", square(1, 50, 1))});
}

} // namespace

TEST_CASE("planar geometry") {
    const auto proj = Projection{};
    CHECK(signed_area(square(0, 0, 2), proj) == doctest::Approx(4.0));
    Ring cw = square(0, 0, 2);
    std::reverse(cw.begin(), cw.end());
    CHECK(signed_area(cw, proj) == doctest::Approx(-4.0));

    CHECK(clipped_area(square(0, 0, 2), BBox{1, 1, 3, 3}, proj) == doctest::Approx(1.0));
    CHECK(clipped_area(square(0, 0, 2), BBox{5, 5, 6, 6}, proj) == doctest::Approx(0.0));
    // L-shaped (non-convex) ring.
    const Ring ell{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    CHECK(signed_area(ell, proj) == doctest::Approx(3.0));
    CHECK(clipped_area(ell, BBox{0.5, 0.5, 2, 2}, proj) == doctest::Approx(1.25));

    CHECK(locate(LonLat{0.5, 0.5}, square(0, 0, 1)) == Containment::Inside);
    CHECK(locate(LonLat{1.0, 0.5}, square(0, 0, 1)) == Containment::Boundary);
    CHECK(locate(LonLat{0.0, 0.0}, square(0, 0, 1)) == Containment::Boundary);
    CHECK(locate(LonLat{1.5, 0.5}, square(0, 0, 1)) == Containment::Outside);

    CHECK(is_simple(ell));
    CHECK_FALSE(is_simple(Ring{{0, 0}, {1, 1}, {1, 0}, {0, 1}})); // bow tie
    CHECK(segments_cross({0, 0}, {1, 1}, {0, 1}, {1, 0}));
    CHECK_FALSE(segments_cross({0, 0}, {1, 0}, {0, 1}, {1, 1}));
}

TEST_CASE("clipped area never exceeds either area") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const auto proj = Projection::at_latitude(52.0);
    const Ring ell{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    for (int i = 0; i < 500; ++i) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        const BBox box{std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d)};
        const double clip = clipped_area(ell, box, proj);
        const double box_area = (box.lon_max - box.lon_min) * (box.lat_max - box.lat_min) * proj.cos_lat0;
        CHECK(clip >= -1e-12);
        CHECK(clip <= box_area + 1e-12);
        CHECK(clip <= signed_area(ell, proj) + 1e-12);
    }
}

TEST_CASE("region set validation") {
    CHECK_NOTHROW(west_east());
    CHECK_THROWS_AS(RegionSet({region("A", "g", square(0, 50, 1)), region("B", "g", square(0.5, 50, 1))}), DataError);
    CHECK_THROWS_AS(RegionSet({region("A", "g", square(0, 50, 1)), region("A", "g", square(5, 50, 1))}), DataError);
    CHECK_THROWS_AS(RegionSet({region("Bow", "g", Ring{{0, 0}, {1, 1}, {1, 0}, {0, 1}})}), DataError);

    const auto set = west_east();
    CHECK(set.group_of("West") == "A");
    CHECK_FALSE(set.group_of("Nowhere"));
    CHECK(set.find("East") != nullptr);
}

TEST_CASE("region assignment") {
    const auto set = west_east();
    CHECK(assign_region(LonLat{0.5, 50.5}, set) == "West");
    CHECK(assign_region(LonLat{1.5, 50.5}, set) == "East");
    CHECK_FALSE(assign_region(LonLat{3.0, 50.5}, set));
    // On the shared border the first region in file order wins.
    CHECK(assign_region(LonLat{1.0, 50.5}, set) == "West");

    // A box mostly in the West.
    CHECK(assign_region(BBox{0.2, 50.2, 1.2, 50.8}, set) == "West");
    // Half and half sits on the threshold; either answer is acceptable.
    const auto half = assign_region(BBox{0.5, 50.2, 1.5, 50.8}, set);
    CHECK((half == std::nullopt || *half == "West" || *half == "East"));
    // Mostly outside every region.
    CHECK_FALSE(assign_region(BBox{1.8, 50.2, 3.8, 50.8}, set));
    // Zero-area box behaves as its center.
    CHECK(assign_region(BBox{0.3, 50.3, 0.3, 50.3}, set) == "West");
}

TEST_CASE("regions from GeoJSON") {
    const auto set = parse_regions(R"({"type": "FeatureCollection", "features": [
      {"type": "Feature", "properties": {"name": "North", "group": "N"},
       "geometry": {"type": "Polygon", "coordinates": [[[0, 51], [1, 51], [1, 52], [0, 52], [0, 51]]]}},
      {"type": "Feature", "properties": {"name": "South", "group": "S"},
       "geometry": {"type": "MultiPolygon", "coordinates": [[[[0, 50], [1, 50], [1, 51], [0, 51], [0, 50]]],
                                                             [[[3, 50], [4, 50], [4, 51], [3, 51], [3, 50]]]]}}]})");
    CHECK(set.regions().size() == 2);
    CHECK(assign_region(LonLat{3.5, 50.5}, set) == "South");
    CHECK(assign_region(LonLat{0.5, 51.5}, set) == "North");
    CHECK(set.group_of("North") == "N");

    CHECK_THROWS_AS(parse_regions("[]"), DataError);
    CHECK_THROWS_AS(parse_regions(R"({"type": "FeatureCollection", "features": [
      {"type": "Feature", "properties": {"group": "N"},
       "geometry": {"type": "Polygon", "coordinates": [[[0, 51], [1, 51], [1, 52], [0, 51]]]}}]})"),
                    DataError);
}
