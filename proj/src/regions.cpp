#include "wxmood/regions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "wxmood/errors.hpp"

namespace wxmood {

using nlohmann::json;

Containment locate(const LonLat& p, const Region& region) {
    bool on_boundary = false;
    for (const auto& part : region.parts) {
        const Containment outer = locate(p, part.outer);
        if (outer == Containment::Outside)
            continue;
        if (outer == Containment::Boundary) {
            on_boundary = true;
            continue;
        }
        Containment verdict = Containment::Inside;
        for (const auto& hole : part.holes) {
            const Containment h = locate(p, hole);
            if (h == Containment::Inside) {
                verdict = Containment::Outside;
                break;
            }
            if (h == Containment::Boundary)
                verdict = Containment::Boundary;
        }
        if (verdict == Containment::Inside)
            return verdict;
        if (verdict == Containment::Boundary)
            on_boundary = true;
    }
    return on_boundary ? Containment::Boundary : Containment::Outside;
}

double overlap_area(const Region& region, const BBox& box, const Projection& proj) {
    double area = 0.0;
    for (const auto& part : region.parts) {
        area += clipped_area(part.outer, box, proj);
        for (const auto& hole : part.holes)
            area -= clipped_area(hole, box, proj);
    }
    return std::max(0.0, area);
}

namespace {

std::vector<const Ring*> rings_of(const Region& r) {
    std::vector<const Ring*> rings;
    for (const auto& part : r.parts) {
        rings.push_back(&part.outer);
        for (const auto& hole : part.holes)
            rings.push_back(&hole);
    }
    return rings;
}

bool rings_cross(const Ring& a, const Ring& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            if (segments_cross(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]))
                return true;
    return false;
}

// A point strictly inside the part (outside its holes), found by scanning
// horizontal lines between distinct vertex latitudes.
std::optional<LonLat> interior_point(const PolygonPart& part, const Region& owner) {
    std::set<double> lats;
    for (const auto& v : part.outer)
        lats.insert(v.lat);
    std::vector<double> ys(lats.begin(), lats.end());
    for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
        const double y = 0.5 * (ys[k] + ys[k + 1]);
        std::vector<double> xs;
        const Ring& ring = part.outer;
        for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
            const LonLat& a = ring[j];
            const LonLat& b = ring[i];
            if ((a.lat > y) != (b.lat > y))
                xs.push_back(a.lon + (y - a.lat) / (b.lat - a.lat) * (b.lon - a.lon));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t m = 0; m + 1 < xs.size(); m += 2) {
            const LonLat p{0.5 * (xs[m] + xs[m + 1]), y};
            if (locate(p, owner) == Containment::Inside)
                return p;
        }
    }
    return std::nullopt;
}

bool regions_overlap(const Region& a, const Region& b) {
    const auto ra = rings_of(a);
    const auto rb = rings_of(b);
    for (const Ring* x : ra)
        for (const Ring* y : rb)
            if (rings_cross(*x, *y))
                return true;
    for (const Ring* x : ra)
        for (const auto& v : *x)
            if (locate(v, b) == Containment::Inside)
                return true;
    for (const Ring* y : rb)
        for (const auto& v : *y)
            if (locate(v, a) == Containment::Inside)
                return true;
    // Shared vertices on each other's edges: an edge midpoint can still be inside.
    for (const Ring* x : ra)
        for (std::size_t i = 0; i < x->size(); ++i) {
            const auto& p = (*x)[i];
            const auto& q = (*x)[(i + 1) % x->size()];
            if (locate({(p.lon + q.lon) / 2, (p.lat + q.lat) / 2}, b) == Containment::Inside)
                return true;
        }
    for (const Ring* y : rb)
        for (std::size_t i = 0; i < y->size(); ++i) {
            const auto& p = (*y)[i];
            const auto& q = (*y)[(i + 1) % y->size()];
            if (locate({(p.lon + q.lon) / 2, (p.lat + q.lat) / 2}, a) == Containment::Inside)
                return true;
        }
    // Catches coincident outlines, where no vertex is strictly inside the other.
    for (const auto& part : a.parts)
        if (auto p = interior_point(part, a); p && locate(*p, b) == Containment::Inside)
            return true;
    for (const auto& part : b.parts)
        if (auto p = interior_point(part, b); p && locate(*p, a) == Containment::Inside)
            return true;
    return false;
}

Ring parse_ring(const json& coords, const std::string& region) {
    if (!coords.is_array())
        throw DataError(fmt::format("region '{}': ring is not an array", region));
    Ring ring;
    for (const auto& v : coords) {
        if (!v.is_array() || v.size() < 2 || !v[0].is_number() || !v[1].is_number())
            throw DataError(fmt::format("region '{}': bad vertex", region));
        LonLat p{v[0].get<double>(), v[1].get<double>()};
        if (!valid_position(p))
            throw DataError(fmt::format("region '{}': vertex out of range", region));
        ring.push_back(p);
    }
    if (ring.size() >= 2 && ring.front() == ring.back())
        ring.pop_back();
    return ring;
}

PolygonPart parse_polygon(const json& coords, const std::string& region) {
    if (!coords.is_array() || coords.empty())
        throw DataError(fmt::format("region '{}': polygon needs at least an outer ring", region));
    PolygonPart part;
    part.outer = parse_ring(coords[0], region);
    for (std::size_t i = 1; i < coords.size(); ++i)
        part.holes.push_back(parse_ring(coords[i], region));
    return part;
}

} // namespace

RegionSet::RegionSet(std::vector<Region> regions) : regions_(std::move(regions)) {
    std::set<std::string> names;
    for (const auto& r : regions_) {
        if (r.name.empty())
            throw DataError("region with empty name");
        if (!names.insert(r.name).second)
            throw DataError(fmt::format("duplicate region name '{}'", r.name));
        if (r.parts.empty())
            throw DataError(fmt::format("region '{}' has no polygons", r.name));
        for (const Ring* ring : rings_of(r))
            if (!is_simple(*ring))
                throw DataError(fmt::format("region '{}' has a self-intersecting or degenerate ring", r.name));
    }
    for (std::size_t i = 0; i < regions_.size(); ++i)
        for (std::size_t j = i + 1; j < regions_.size(); ++j)
            if (regions_overlap(regions_[i], regions_[j]))
                throw DataError(
                    fmt::format("regions '{}' and '{}' overlap", regions_[i].name, regions_[j].name));
}

const Region* RegionSet::find(std::string_view name) const {
    for (const auto& r : regions_)
        if (r.name == name)
            return &r;
    return nullptr;
}

std::optional<std::string> RegionSet::group_of(std::string_view region_name) const {
    const Region* r = find(region_name);
    if (!r || r->group.empty())
        return std::nullopt;
    return r->group;
}

RegionSet parse_regions(std::string_view text) {
    json doc = json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
        !doc.contains("features") || !doc["features"].is_array())
        throw DataError("regions file is not a GeoJSON FeatureCollection");

    std::vector<Region> regions;
    for (const auto& feature : doc["features"]) {
        const auto props = feature.value("properties", json::object());
        if (!props.contains("name") || !props["name"].is_string())
            throw DataError("region feature without a string 'name' property");
        Region region;
        region.name = props["name"].get<std::string>();
        region.group = props.contains("group") && props["group"].is_string() ? props["group"].get<std::string>() : "";
        const auto geom = feature.value("geometry", json::object());
        const std::string type = geom.value("type", "");
        if (!geom.contains("coordinates"))
            throw DataError(fmt::format("region '{}' has no coordinates", region.name));
        if (type == "Polygon") {
            region.parts.push_back(parse_polygon(geom["coordinates"], region.name));
        } else if (type == "MultiPolygon") {
            for (const auto& poly : geom["coordinates"])
                region.parts.push_back(parse_polygon(poly, region.name));
        } else {
            throw DataError(fmt::format("region '{}': unsupported geometry type '{}'", region.name, type));
        }
        regions.push_back(std::move(region));
    }
    return RegionSet(std::move(regions));
}

RegionSet load_regions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError(fmt::format("cannot open regions file '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_regions(buf.str());
}

std::optional<std::string> assign_region(const Geometry& geometry, const RegionSet& regions,
                                         Fraction overlap_threshold) {
    auto by_point = [&](const LonLat& p) -> std::optional<std::string> {
        const Region* boundary_hit = nullptr;
        for (const auto& r : regions.regions()) {
            const Containment c = locate(p, r);
            if (c == Containment::Inside)
                return r.name;
            if (c == Containment::Boundary && !boundary_hit)
                boundary_hit = &r;
        }
        if (boundary_hit)
            return boundary_hit->name;
        return std::nullopt;
    };

    if (const auto* p = std::get_if<LonLat>(&geometry))
        return by_point(*p);

    const BBox& box = std::get<BBox>(geometry);
    if (box.degenerate())
        return by_point(box.center());

    const Projection proj = Projection::at_latitude(box.center().lat);
    const double box_area = std::abs(signed_area(
        Ring{{box.lon_min, box.lat_min}, {box.lon_max, box.lat_min}, {box.lon_max, box.lat_max},
             {box.lon_min, box.lat_max}},
        proj));
    const double needed = overlap_threshold.value() * box_area;

    // Regions are disjoint, so for thresholds above one half at most one can
    // qualify; for lower thresholds the largest overlap wins.
    const Region* best = nullptr;
    double best_area = -1.0;
    for (const auto& r : regions.regions()) {
        const double a = overlap_area(r, box, proj);
        if (a >= needed && a > best_area) {
            best = &r;
            best_area = a;
        }
    }
    if (best)
        return best->name;
    return std::nullopt;
}

} // namespace wxmood
