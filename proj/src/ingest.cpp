#include "cvrisk/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "cvrisk/csv.hpp"

namespace cvrisk {

const std::vector<std::string> kPingCsvHeader = {"vehicle_id", "timestamp", "lat",
                                                 "lon",        "speed_kmh", "accel_ms2"};
const std::vector<std::string> kCrashCsvHeader = {"timestamp", "lat", "lon", "direction"};
const std::vector<std::string> kWeatherCsvHeader = {"station_id", "hour_start", "temp_f", "precip_mm"};
const std::vector<std::string> kStationCsvHeader = {"station_id", "lat", "lon"};

namespace {

void note_error(ParseReport& r, std::size_t line, const std::string& what) {
    ++r.malformed;
    if (r.sample_errors.size() < 10) {
        r.sample_errors.push_back("line " + std::to_string(line) + ": " + what);
    }
}

void check_malformed_ratio(const ParseReport& r, const std::string& path) {
    if (r.total_rows > 0 && r.malformed * 2 > r.total_rows) {
        throw DataError(path + ": " + std::to_string(r.malformed) + " of " +
                        std::to_string(r.total_rows) +
                        " rows malformed (> 50%), refusing to continue");
    }
}

}  // namespace

std::vector<VehiclePing> parse_pings(const std::string& path, ParseReport* report) {
    CsvReader reader(path, kPingCsvHeader);
    ParseReport local;
    ParseReport& rep = report ? *report : local;
    std::vector<VehiclePing> out;
    std::vector<std::string> f;
    while (reader.next_row(f)) {
        ++rep.total_rows;
        if (f.size() != kPingCsvHeader.size()) {
            note_error(rep, reader.line_number(), "expected 6 fields, got " + std::to_string(f.size()));
            continue;
        }
        if (f[0].empty()) {
            note_error(rep, reader.line_number(), "empty vehicle_id");
            continue;
        }
        auto ts = parse_int(f[1]);
        auto lat = parse_double(f[2]);
        auto lon = parse_double(f[3]);
        auto speed = parse_double(f[4]);
        if (!ts || !lat || !lon || !speed) {
            note_error(rep, reader.line_number(), "unparseable numeric field");
            continue;
        }
        if (*lat < -90.0 || *lat > 90.0 || *lon < -180.0 || *lon > 180.0) {
            note_error(rep, reader.line_number(), "coordinates out of range");
            continue;
        }
        if (*speed < 0.0) {
            note_error(rep, reader.line_number(), "negative speed");
            continue;
        }
        std::optional<double> accel;
        if (!f[5].empty()) {
            accel = parse_double(f[5]);
            if (!accel) {
                note_error(rep, reader.line_number(), "unparseable accel");
                continue;
            }
        }
        out.push_back({f[0], *ts, *lat, *lon, *speed, accel});
        ++rep.parsed;
    }
    check_malformed_ratio(rep, path);
    return out;
}

std::vector<CrashRecord> parse_crashes(const std::string& path, ParseReport* report) {
    CsvReader reader(path, kCrashCsvHeader);
    ParseReport local;
    ParseReport& rep = report ? *report : local;
    std::vector<CrashRecord> out;
    std::vector<std::string> f;
    while (reader.next_row(f)) {
        ++rep.total_rows;
        if (f.size() != kCrashCsvHeader.size()) {
            note_error(rep, reader.line_number(), "expected 4 fields");
            continue;
        }
        auto ts = parse_int(f[0]);
        auto lat = parse_double(f[1]);
        auto lon = parse_double(f[2]);
        if (!ts || !lat || !lon) {
            note_error(rep, reader.line_number(), "unparseable numeric field");
            continue;
        }
        CrashRecord c{*ts, *lat, *lon, std::nullopt};
        if (!f[3].empty()) {
            if (f[3] != "EB" && f[3] != "WB") {
                note_error(rep, reader.line_number(), "unknown direction " + f[3]);
                continue;
            }
            c.direction = direction_from_name(f[3]);
        }
        out.push_back(c);
        ++rep.parsed;
    }
    check_malformed_ratio(rep, path);
    return out;
}

std::vector<WeatherRecord> parse_weather(const std::string& path, ParseReport* report) {
    CsvReader reader(path, kWeatherCsvHeader);
    ParseReport local;
    ParseReport& rep = report ? *report : local;
    std::vector<WeatherRecord> out;
    std::vector<std::string> f;
    std::unordered_set<std::string> seen;  // one record per (station, hour)
    while (reader.next_row(f)) {
        ++rep.total_rows;
        if (f.size() != kWeatherCsvHeader.size()) {
            note_error(rep, reader.line_number(), "expected 4 fields");
            continue;
        }
        auto hour = parse_int(f[1]);
        auto temp = parse_double(f[2]);
        auto precip = parse_double(f[3]);
        if (f[0].empty() || !hour || !temp || !precip) {
            note_error(rep, reader.line_number(), "unparseable field");
            continue;
        }
        if (*hour % 3600 != 0) {
            note_error(rep, reader.line_number(), "hour_start not aligned to hour");
            continue;
        }
        if (*precip < 0.0) {
            note_error(rep, reader.line_number(), "negative precipitation");
            continue;
        }
        std::string key = f[0] + "/" + f[1];
        if (!seen.insert(key).second) {
            note_error(rep, reader.line_number(), "duplicate (station, hour)");
            continue;
        }
        out.push_back({f[0], *hour, *temp, *precip});
        ++rep.parsed;
    }
    check_malformed_ratio(rep, path);
    return out;
}

std::vector<WeatherStation> parse_stations(const std::string& path) {
    CsvReader reader(path, kStationCsvHeader);
    std::vector<WeatherStation> out;
    std::vector<std::string> f;
    while (reader.next_row(f)) {
        if (f.size() != kStationCsvHeader.size()) {
            throw DataError(path + " line " + std::to_string(reader.line_number()) + ": expected 3 fields");
        }
        auto lat = parse_double(f[1]);
        auto lon = parse_double(f[2]);
        if (f[0].empty() || !lat || !lon) {
            throw DataError(path + " line " + std::to_string(reader.line_number()) + ": unparseable field");
        }
        out.push_back({f[0], {*lat, *lon}});
    }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw DataError("quantile of empty collection");
    std::sort(values.begin(), values.end());
    if (q <= 0.0) return values.front();
    if (q >= 1.0) return values.back();
    double pos = q * static_cast<double>(values.size() - 1);
    auto i = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(i);
    if (i + 1 >= values.size()) return values.back();
    return values[i] + frac * (values[i + 1] - values[i]);
}

SpeedBounds compute_speed_bounds(std::span<const double> speeds_kmh, double iqr_k) {
    if (speeds_kmh.empty()) throw DataError("speed bounds need a nonempty collection");
    std::vector<double> v(speeds_kmh.begin(), speeds_kmh.end());
    SpeedBounds b;
    b.q1 = quantile(v, 0.25);
    b.q3 = quantile(std::move(v), 0.75);
    b.lower = 0.0;
    b.upper = b.q3 + iqr_k * (b.q3 - b.q1);
    return b;
}

std::vector<VehiclePing> clean_pings(const std::vector<VehiclePing>& pings, const SpeedBounds& bounds,
                                     double accel_cap_ms2, CleanReport* report) {
    CleanReport local;
    CleanReport& rep = report ? *report : local;
    rep.input = pings.size();
    std::vector<VehiclePing> out;
    out.reserve(pings.size());
    std::unordered_set<std::string> seen;
    seen.reserve(pings.size());
    for (const auto& p : pings) {
        if (p.speed_kmh < bounds.lower || p.speed_kmh > bounds.upper) {
            ++rep.speed_out_of_bounds;
            continue;
        }
        if (p.accel_ms2 && std::abs(*p.accel_ms2) > accel_cap_ms2) {
            ++rep.accel_out_of_bounds;
            continue;
        }
        std::string key = p.vehicle_id + "\x1f" + std::to_string(p.timestamp);
        if (!seen.insert(std::move(key)).second) {
            ++rep.duplicates;
            continue;
        }
        out.push_back(p);
    }
    rep.retained = out.size();
    return out;
}

CorridorMatcher::CorridorMatcher(const CorridorMap& map)
    : map_(&map), proj_(map.segments.empty() ? LatLon{} : map.segments.front().polyline.front()) {
    map.validate();
    planar_.reserve(map.segments.size());
    for (const auto& s : map.segments) {
        PlanarSegment ps;
        ps.direction = s.direction;
        ps.points.reserve(s.polyline.size());
        ps.cum_m.reserve(s.polyline.size());
        double cum = 0.0;
        for (std::size_t i = 0; i < s.polyline.size(); ++i) {
            ps.points.push_back(proj_.to_xy(s.polyline[i]));
            if (i > 0) {
                cum += std::hypot(ps.points[i].x - ps.points[i - 1].x,
                                  ps.points[i].y - ps.points[i - 1].y);
            }
            ps.cum_m.push_back(cum);
        }
        planar_.push_back(std::move(ps));
    }
}

std::optional<SegmentMatch> CorridorMatcher::match(const LatLon& p,
                                                   std::optional<Direction> direction) const {
    XY q = proj_.to_xy(p);
    SegmentMatch best;
    best.distance_m = map_->match_tolerance_m;
    bool found = false;
    for (std::size_t si = 0; si < planar_.size(); ++si) {
        const auto& ps = planar_[si];
        if (direction && ps.direction != *direction) continue;
        for (std::size_t i = 1; i < ps.points.size(); ++i) {
            auto proj = project_point_on_segment(q, ps.points[i - 1], ps.points[i]);
            if (proj.distance < best.distance_m ||
                (proj.distance == best.distance_m && !found)) {
                double piece = ps.cum_m[i] - ps.cum_m[i - 1];
                best.segment_index = static_cast<int>(si);
                best.distance_m = proj.distance;
                best.offset_miles = (ps.cum_m[i - 1] + proj.t * piece) / kMetersPerMile;
                found = true;
            }
        }
    }
    if (!found || best.distance_m > map_->match_tolerance_m) return std::nullopt;
    return best;
}

std::vector<MatchedPing> match_pings(const std::vector<VehiclePing>& pings,
                                     const CorridorMatcher& matcher, std::size_t* unmatched) {
    std::vector<MatchedPing> out;
    out.reserve(pings.size());
    std::size_t misses = 0;
    for (const auto& p : pings) {
        auto m = matcher.match({p.lat, p.lon});
        if (!m) {
            ++misses;
            continue;
        }
        out.push_back({p, m->segment_index, m->offset_miles});
    }
    if (unmatched) *unmatched = misses;
    return out;
}

}  // namespace cvrisk
