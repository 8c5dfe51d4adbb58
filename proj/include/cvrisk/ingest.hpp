#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvrisk/corridor.hpp"
#include "cvrisk/geo.hpp"

namespace cvrisk {

struct VehiclePing {
    std::string vehicle_id;
    std::int64_t timestamp = 0;  // epoch seconds UTC
    double lat = 0.0;
    double lon = 0.0;
    double speed_kmh = 0.0;
    std::optional<double> accel_ms2;  // sensor-reported, may be absent
};

struct CrashRecord {
    std::int64_t timestamp = 0;
    double lat = 0.0;
    double lon = 0.0;
    std::optional<Direction> direction;
};

struct WeatherRecord {
    std::string station_id;
    std::int64_t hour_start = 0;  // aligned to the hour
    double temperature_f = 0.0;
    double precipitation_mm = 0.0;
};

struct WeatherStation {
    std::string station_id;
    LatLon location;
};

extern const std::vector<std::string> kPingCsvHeader;     // vehicle_id,timestamp,lat,lon,speed_kmh,accel_ms2
extern const std::vector<std::string> kCrashCsvHeader;    // timestamp,lat,lon,direction
extern const std::vector<std::string> kWeatherCsvHeader;  // station_id,hour_start,temp_f,precip_mm
extern const std::vector<std::string> kStationCsvHeader;  // station_id,lat,lon

struct ParseReport {
    std::size_t total_rows = 0;
    std::size_t parsed = 0;
    std::size_t malformed = 0;
    std::vector<std::string> sample_errors;  // first few diagnostics
};

// Malformed rows are counted and skipped. Throws if the file is missing,
// the header differs, or more than half of the rows are malformed.
std::vector<VehiclePing> parse_pings(const std::string& path, ParseReport* report = nullptr);
std::vector<CrashRecord> parse_crashes(const std::string& path, ParseReport* report = nullptr);
std::vector<WeatherRecord> parse_weather(const std::string& path, ParseReport* report = nullptr);
// Station coordinates live in a sidecar file so the weather schema stays flat.
std::vector<WeatherStation> parse_stations(const std::string& path);

// Linear interpolation between order statistics (values copied and sorted).
double quantile(std::vector<double> values, double q);

struct SpeedBounds {
    double lower = 0.0;  // fixed at zero
    double upper = 0.0;  // Q3 + k * IQR
    double q1 = 0.0;
    double q3 = 0.0;
};

SpeedBounds compute_speed_bounds(std::span<const double> speeds_kmh, double iqr_k = 1.5);

struct CleanReport {
    std::size_t input = 0;
    std::size_t retained = 0;
    std::size_t speed_out_of_bounds = 0;
    std::size_t accel_out_of_bounds = 0;
    std::size_t duplicates = 0;
};

// Drops pings outside the speed bounds or with |accel| above the cap, and
// duplicate (vehicle, timestamp) rows keeping the first. Idempotent.
std::vector<VehiclePing> clean_pings(const std::vector<VehiclePing>& pings, const SpeedBounds& bounds,
                                     double accel_cap_ms2 = 13.0, CleanReport* report = nullptr);

struct SegmentMatch {
    int segment_index = -1;
    double offset_miles = 0.0;  // along-segment distance from segment start
    double distance_m = 0.0;    // perpendicular distance at the match
};

// Nearest-segment matcher over the corridor polylines. Planar geometry is
// precomputed once; matching itself is pure and thread safe.
class CorridorMatcher {
public:
    explicit CorridorMatcher(const CorridorMap& map);

    // No-match (beyond tolerance) is a value, not an error. If a direction
    // is given only segments of that direction are considered.
    std::optional<SegmentMatch> match(const LatLon& p,
                                      std::optional<Direction> direction = std::nullopt) const;

    const CorridorMap& map() const { return *map_; }

private:
    struct PlanarSegment {
        std::vector<XY> points;
        std::vector<double> cum_m;  // cumulative arc length at each vertex
        Direction direction;
    };
    const CorridorMap* map_;
    LocalProjection proj_;
    std::vector<PlanarSegment> planar_;
};

struct MatchedPing {
    VehiclePing ping;
    int segment_index = -1;
    double offset_miles = 0.0;
};

// Convenience pass over a cleaned stream; unmatched pings are dropped.
std::vector<MatchedPing> match_pings(const std::vector<VehiclePing>& pings,
                                     const CorridorMatcher& matcher,
                                     std::size_t* unmatched = nullptr);

}  // namespace cvrisk
