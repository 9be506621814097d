#include "wxmood/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wxmood {

bool valid_position(const LonLat& p) {
    return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 &&
           p.lon <= 180.0;
}

bool valid_bbox(const BBox& b) {
    return valid_position({b.lon_min, b.lat_min}) && valid_position({b.lon_max, b.lat_max}) &&
           b.lon_min <= b.lon_max && b.lat_min <= b.lat_max;
}

Projection Projection::at_latitude(double lat_deg) {
    return Projection{std::cos(lat_deg * std::numbers::pi / 180.0)};
}

double signed_area(std::span<const LonLat> ring, const Projection& proj) {
    if (ring.size() < 3)
        return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const LonLat& a = ring[i];
        const LonLat& b = ring[(i + 1) % ring.size()];
        twice += a.lon * b.lat - b.lon * a.lat;
    }
    return 0.5 * twice * proj.cos_lat0;
}

namespace {

// One Sutherland-Hodgman pass against the half-plane `inside`.
template <typename Inside, typename Cross>
std::vector<LonLat> clip_pass(const std::vector<LonLat>& poly, Inside inside, Cross cross) {
    std::vector<LonLat> out;
    if (poly.empty())
        return out;
    out.reserve(poly.size() + 4);
    LonLat prev = poly.back();
    bool prev_in = inside(prev);
    for (const LonLat& cur : poly) {
        const bool cur_in = inside(cur);
        if (cur_in) {
            if (!prev_in)
                out.push_back(cross(prev, cur));
            out.push_back(cur);
        } else if (prev_in) {
            out.push_back(cross(prev, cur));
        }
        prev = cur;
        prev_in = cur_in;
    }
    return out;
}

LonLat at_lon(const LonLat& a, const LonLat& b, double lon) {
    const double t = (lon - a.lon) / (b.lon - a.lon);
    return {lon, a.lat + t * (b.lat - a.lat)};
}

LonLat at_lat(const LonLat& a, const LonLat& b, double lat) {
    const double t = (lat - a.lat) / (b.lat - a.lat);
    return {a.lon + t * (b.lon - a.lon), lat};
}

double orient(const LonLat& a, const LonLat& b, const LonLat& c) {
    return (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
}

} // namespace

double clipped_area(std::span<const LonLat> ring, const BBox& box, const Projection& proj) {
    std::vector<LonLat> poly(ring.begin(), ring.end());
    poly = clip_pass(poly, [&](const LonLat& p) { return p.lon >= box.lon_min; },
                     [&](const LonLat& a, const LonLat& b) { return at_lon(a, b, box.lon_min); });
    poly = clip_pass(poly, [&](const LonLat& p) { return p.lon <= box.lon_max; },
                     [&](const LonLat& a, const LonLat& b) { return at_lon(a, b, box.lon_max); });
    poly = clip_pass(poly, [&](const LonLat& p) { return p.lat >= box.lat_min; },
                     [&](const LonLat& a, const LonLat& b) { return at_lat(a, b, box.lat_min); });
    poly = clip_pass(poly, [&](const LonLat& p) { return p.lat <= box.lat_max; },
                     [&](const LonLat& a, const LonLat& b) { return at_lat(a, b, box.lat_max); });
    return std::abs(signed_area(poly, proj));
}

Containment locate(const LonLat& p, std::span<const LonLat> ring, double eps) {
    const std::size_t n = ring.size();
    if (n < 3)
        return Containment::Outside;
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const LonLat& a = ring[j];
        const LonLat& b = ring[i];

        // Boundary: within eps of segment ab.
        const double dx = b.lon - a.lon;
        const double dy = b.lat - a.lat;
        const double len2 = dx * dx + dy * dy;
        double t = len2 > 0.0 ? ((p.lon - a.lon) * dx + (p.lat - a.lat) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double ex = a.lon + t * dx - p.lon;
        const double ey = a.lat + t * dy - p.lat;
        if (ex * ex + ey * ey <= eps * eps)
            return Containment::Boundary;

        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            const double x_cross = a.lon + (p.lat - a.lat) / (b.lat - a.lat) * dx;
            if (p.lon < x_cross)
                inside = !inside;
        }
    }
    return inside ? Containment::Inside : Containment::Outside;
}

bool segments_cross(const LonLat& a, const LonLat& b, const LonLat& c, const LonLat& d) {
    const double o1 = orient(a, b, c);
    const double o2 = orient(a, b, d);
    const double o3 = orient(c, d, a);
    const double o4 = orient(c, d, b);
    return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

bool is_simple(std::span<const LonLat> ring) {
    const std::size_t n = ring.size();
    if (n < 3)
        return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (ring[i] == ring[j])
                return false;
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent)
                continue;
            if (segments_cross(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

} // namespace wxmood
