#pragma once

#include <span>
#include <variant>
#include <vector>

namespace wxmood {

/// Geographic position in degrees.
struct LonLat {
    double lon = 0.0;
    double lat = 0.0;

    friend bool operator==(const LonLat&, const LonLat&) = default;
};

struct BBox {
    double lon_min = 0.0;
    double lat_min = 0.0;
    double lon_max = 0.0;
    double lat_max = 0.0;

    LonLat center() const { return {(lon_min + lon_max) / 2.0, (lat_min + lat_max) / 2.0}; }
    bool degenerate() const { return !(lon_max > lon_min) || !(lat_max > lat_min); }

    friend bool operator==(const BBox&, const BBox&) = default;
};

using Geometry = std::variant<LonLat, BBox>;

bool valid_position(const LonLat& p);
bool valid_bbox(const BBox& b);

/// Closed ring of vertices; the closing vertex is not repeated.
using Ring = std::vector<LonLat>;

/// Equirectangular projection used for all planar area work: x = lon * cos(lat0),
/// y = lat, with lat0 fixed per computation so ratios are preserved.
struct Projection {
    double cos_lat0 = 1.0;

    static Projection at_latitude(double lat_deg);
};

/// Signed shoelace area in projected square degrees (counter-clockwise positive).
double signed_area(std::span<const LonLat> ring, const Projection& proj);

/// Area of ring ∩ box, for any simple ring (convex or not).
double clipped_area(std::span<const LonLat> ring, const BBox& box, const Projection& proj);

enum class Containment { Outside, Boundary, Inside };

/// Point-in-ring test with an explicit boundary band of `eps` degrees.
Containment locate(const LonLat& p, std::span<const LonLat> ring, double eps = 1e-12);

/// True when segments ab and cd cross at a single point interior to both.
bool segments_cross(const LonLat& a, const LonLat& b, const LonLat& c, const LonLat& d);

/// True when no two non-adjacent edges of the ring cross and the ring has at
/// least three distinct vertices.
bool is_simple(std::span<const LonLat> ring);

} // namespace wxmood
