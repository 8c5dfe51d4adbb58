#include "cvrisk/geo.hpp"

namespace cvrisk {

double haversine_m(const LatLon& a, const LatLon& b) {
    double lat1 = deg2rad(a.lat), lat2 = deg2rad(b.lat);
    double dlat = lat2 - lat1;
    double dlon = deg2rad(b.lon - a.lon);
    double s1 = std::sin(dlat / 2.0), s2 = std::sin(dlon / 2.0);
    double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

SegmentProjection project_point_on_segment(const XY& p, const XY& a, const XY& b) {
    double dx = b.x - a.x, dy = b.y - a.y;
    double l2 = dx * dx + dy * dy;
    if (l2 == 0.0) {
        return {std::hypot(p.x - a.x, p.y - a.y), 0.0};
    }
    double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / l2;
    t = std::max(0.0, std::min(1.0, t));
    double px = a.x + t * dx, py = a.y + t * dy;
    return {std::hypot(p.x - px, p.y - py), t};
}

double polyline_length_m(const std::vector<LatLon>& pts) {
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        len += haversine_m(pts[i - 1], pts[i]);
    }
    return len;
}

}  // namespace cvrisk
