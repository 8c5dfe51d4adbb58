#pragma once

#include <cmath>
#include <vector>

namespace cvrisk {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMetersPerMile = 1609.344;
inline constexpr double kKmhToMs = 1.0 / 3.6;

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

struct XY {
    double x = 0.0;
    double y = 0.0;
};

inline double deg2rad(double d) { return d * kPi / 180.0; }

double haversine_m(const LatLon& a, const LatLon& b);

// Equirectangular projection around a reference latitude. Adequate for
// corridor-scale point-to-segment distances (sub-meter error at < 100 km).
class LocalProjection {
public:
    explicit LocalProjection(const LatLon& ref)
        : ref_lat_(deg2rad(ref.lat)), ref_lon_(deg2rad(ref.lon)), cos_ref_(std::cos(ref_lat_)) {}

    XY to_xy(const LatLon& p) const {
        return {kEarthRadiusM * (deg2rad(p.lon) - ref_lon_) * cos_ref_,
                kEarthRadiusM * (deg2rad(p.lat) - ref_lat_)};
    }

    LatLon to_latlon(const XY& p) const {
        return {(ref_lat_ + p.y / kEarthRadiusM) * 180.0 / kPi,
                (ref_lon_ + p.x / (kEarthRadiusM * cos_ref_)) * 180.0 / kPi};
    }

private:
    double ref_lat_;
    double ref_lon_;
    double cos_ref_;
};

struct SegmentProjection {
    double distance = 0.0;  // point to segment, same units as input
    double t = 0.0;         // clamped position along ab in [0, 1]
};

SegmentProjection project_point_on_segment(const XY& p, const XY& a, const XY& b);

double polyline_length_m(const std::vector<LatLon>& pts);

}  // namespace cvrisk
