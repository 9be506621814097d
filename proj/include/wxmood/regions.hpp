#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wxmood/fraction.hpp"
#include "wxmood/geometry.hpp"

namespace wxmood {

struct PolygonPart {
    Ring outer;
    std::vector<Ring> holes;
};

struct Region {
    std::string name;
    std::string group;
    std::vector<PolygonPart> parts;
};

/// Named, pairwise non-overlapping planar polygons with a group label each.
class RegionSet {
public:
    /// Validates simplicity of every ring, name uniqueness and pairwise
    /// non-overlap (shared borders are allowed). Throws DataError.
    explicit RegionSet(std::vector<Region> regions);

    const std::vector<Region>& regions() const { return regions_; }
    const Region* find(std::string_view name) const;
    std::optional<std::string> group_of(std::string_view region_name) const;

private:
    std::vector<Region> regions_;
};

/// Loads a GeoJSON FeatureCollection of Polygon/MultiPolygon features with
/// "name" and "group" properties.
RegionSet load_regions(const std::filesystem::path& path);
RegionSet parse_regions(std::string_view geojson);

Containment locate(const LonLat& p, const Region& region);

/// Planar area of region ∩ box using the cos(latitude) projection at `proj`.
double overlap_area(const Region& region, const BBox& box, const Projection& proj);

/// Point → the region containing it (boundary counts). BBox → the region
/// covering at least `overlap_threshold` of its area; zero-area boxes are
/// treated as their center point.
std::optional<std::string> assign_region(const Geometry& geometry, const RegionSet& regions,
                                         Fraction overlap_threshold = Fraction::from_double(0.5));

} // namespace wxmood
