#include "cvrisk/corridor.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "cvrisk/csv.hpp"
#include "json.hpp"

namespace cvrisk {

using nlohmann::json;

std::string direction_name(Direction d) {
    return d == Direction::EB ? "EB" : "WB";
}

Direction direction_from_name(const std::string& s) {
    if (s == "EB") return Direction::EB;
    if (s == "WB") return Direction::WB;
    throw DataError("unknown direction: " + s);
}

int CorridorMap::index_of(const std::string& id) const {
    if (id_index_.size() != segments.size()) {
        id_index_.clear();
        for (std::size_t i = 0; i < segments.size(); ++i) {
            id_index_[segments[i].id] = static_cast<int>(i);
        }
    }
    auto it = id_index_.find(id);
    return it == id_index_.end() ? -1 : it->second;
}

int CorridorMap::upstream_of(int idx) const {
    if (idx <= 0 || idx >= static_cast<int>(segments.size())) return -1;
    if (segments[idx - 1].direction != segments[idx].direction) return -1;
    return idx - 1;
}

int CorridorMap::downstream_of(int idx) const {
    if (idx < 0 || idx + 1 >= static_cast<int>(segments.size())) return -1;
    if (segments[idx + 1].direction != segments[idx].direction) return -1;
    return idx + 1;
}

LatLon CorridorMap::segment_midpoint(int idx) const {
    const auto& poly = segments[idx].polyline;
    double half = polyline_length_m(poly) / 2.0;
    double walked = 0.0;
    for (std::size_t i = 1; i < poly.size(); ++i) {
        double step = haversine_m(poly[i - 1], poly[i]);
        if (walked + step >= half && step > 0.0) {
            double t = (half - walked) / step;
            return {poly[i - 1].lat + t * (poly[i].lat - poly[i - 1].lat),
                    poly[i - 1].lon + t * (poly[i].lon - poly[i - 1].lon)};
        }
        walked += step;
    }
    return poly.empty() ? LatLon{} : poly.back();
}

void CorridorMap::validate() const {
    if (segments.empty()) throw DataError("corridor has no segments");
    std::unordered_map<std::string, int> seen;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        if (s.id.empty()) throw DataError("segment with empty id");
        if (!seen.emplace(s.id, 1).second) throw DataError("duplicate segment id: " + s.id);
        if (s.polyline.size() < 2) throw DataError("segment " + s.id + " needs >= 2 polyline points");
        if (s.length_miles <= 0.0) throw DataError("segment " + s.id + " has non-positive length");
        // consecutive segments in one direction must share an endpoint
        if (i > 0 && segments[i - 1].direction == s.direction) {
            const auto& prev_end = segments[i - 1].polyline.back();
            const auto& cur_start = s.polyline.front();
            if (haversine_m(prev_end, cur_start) > 1.0) {
                throw DataError("segments " + segments[i - 1].id + " and " + s.id +
                                " do not share an endpoint");
            }
        }
    }
    if (match_tolerance_m <= 0.0) throw DataError("match tolerance must be positive");
}

void CorridorMap::save(const std::string& path) const {
    json j;
    j["format"] = "cvrisk-corridor";
    j["version"] = 1;
    j["match_tolerance_m"] = match_tolerance_m;
    json segs = json::array();
    for (const auto& s : segments) {
        json poly = json::array();
        for (const auto& p : s.polyline) poly.push_back({p.lat, p.lon});
        segs.push_back({{"segment_id", s.id},
                        {"direction", direction_name(s.direction)},
                        {"length_miles", s.length_miles},
                        {"polyline", poly}});
    }
    j["segments"] = std::move(segs);
    write_file(path, j.dump(1) + "\n");
}

CorridorMap CorridorMap::load(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw DataError("corridor file " + path + ": " + e.what());
    }
    if (j.value("format", "") != "cvrisk-corridor") {
        throw DataError("corridor file " + path + ": missing format marker");
    }
    CorridorMap map;
    map.match_tolerance_m = j.value("match_tolerance_m", 100.0);
    for (const auto& js : j.at("segments")) {
        Segment s;
        s.id = js.at("segment_id").get<std::string>();
        s.direction = direction_from_name(js.at("direction").get<std::string>());
        s.length_miles = js.at("length_miles").get<double>();
        for (const auto& jp : js.at("polyline")) {
            s.polyline.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
        }
        map.segments.push_back(std::move(s));
    }
    map.validate();
    return map;
}

namespace {

LatLon interpolate(const LatLon& a, const LatLon& b, double t) {
    return {a.lat + t * (b.lat - a.lat), a.lon + t * (b.lon - a.lon)};
}

// Cut points along the centerline at given cumulative-distance marks.
std::vector<std::vector<LatLon>> cut_at_marks(const std::vector<LatLon>& line,
                                              const std::vector<double>& marks_m) {
    std::vector<std::vector<LatLon>> pieces;
    std::vector<LatLon> cur{line.front()};
    double walked = 0.0;
    std::size_t mark = 0;
    for (std::size_t i = 1; i < line.size(); ++i) {
        double step = haversine_m(line[i - 1], line[i]);
        double seg_start = walked;
        while (mark < marks_m.size() && step > 0.0 && marks_m[mark] <= walked + step) {
            double t = (marks_m[mark] - seg_start) / step;
            LatLon cut = interpolate(line[i - 1], line[i], t);
            cur.push_back(cut);
            pieces.push_back(cur);
            cur = {cut};
            ++mark;
        }
        walked += step;
        cur.push_back(line[i]);
    }
    if (cur.size() >= 2) pieces.push_back(cur);
    return pieces;
}

}  // namespace

CorridorMap slice_corridor(const std::vector<LatLon>& centerline, int n_slices,
                           SliceMode mode, double match_tolerance_m) {
    if (centerline.size() < 2) throw DataError("centerline needs >= 2 points");
    if (n_slices < 1) throw DataError("need at least one slice");

    std::vector<double> marks;
    if (mode == SliceMode::equal_arc_length) {
        double total = polyline_length_m(centerline);
        for (int k = 1; k < n_slices; ++k) {
            marks.push_back(total * k / n_slices);
        }
    } else {
        // coordinate slicing: equal longitude steps, so arc lengths vary
        double lon0 = centerline.front().lon, lon1 = centerline.back().lon;
        double walked = 0.0;
        std::vector<double> cut_lons;
        for (int k = 1; k < n_slices; ++k) {
            cut_lons.push_back(lon0 + (lon1 - lon0) * k / n_slices);
        }
        std::size_t next = 0;
        for (std::size_t i = 1; i < centerline.size() && next < cut_lons.size(); ++i) {
            double step = haversine_m(centerline[i - 1], centerline[i]);
            double la = centerline[i - 1].lon, lb = centerline[i].lon;
            while (next < cut_lons.size()) {
                double c = cut_lons[next];
                bool crosses = (la <= c && c < lb) || (lb < c && c <= la);
                if (!crosses) break;
                double t = (c - la) / (lb - la);
                marks.push_back(walked + t * step);
                ++next;
            }
            walked += step;
        }
    }

    auto pieces = cut_at_marks(centerline, marks);
    if (static_cast<int>(pieces.size()) != n_slices) {
        throw DataError("slicing produced " + std::to_string(pieces.size()) +
                        " pieces, expected " + std::to_string(n_slices));
    }

    CorridorMap map;
    map.match_tolerance_m = match_tolerance_m;
    char buf[32];
    for (int i = 0; i < n_slices; ++i) {
        Segment s;
        std::snprintf(buf, sizeof(buf), "EB_%03d", i);
        s.id = buf;
        s.direction = Direction::EB;
        s.polyline = pieces[i];
        s.length_miles = polyline_length_m(s.polyline) / kMetersPerMile;
        map.segments.push_back(std::move(s));
    }
    for (int i = 0; i < n_slices; ++i) {
        Segment s;
        std::snprintf(buf, sizeof(buf), "WB_%03d", i);
        s.id = buf;
        s.direction = Direction::WB;
        // WB travels against centerline order
        s.polyline = pieces[n_slices - 1 - i];
        std::reverse(s.polyline.begin(), s.polyline.end());
        s.length_miles = polyline_length_m(s.polyline) / kMetersPerMile;
        map.segments.push_back(std::move(s));
    }
    map.validate();
    return map;
}

}  // namespace cvrisk
