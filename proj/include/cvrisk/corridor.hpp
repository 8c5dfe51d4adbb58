#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "cvrisk/geo.hpp"

namespace cvrisk {

enum class Direction { EB, WB };

std::string direction_name(Direction d);
Direction direction_from_name(const std::string& s);

struct Segment {
    std::string id;
    Direction direction = Direction::EB;
    std::vector<LatLon> polyline;  // in travel order
    double length_miles = 0.0;
};

// Ordered directional segments. Within one direction the list is travel
// order: upstream neighbor is the previous entry, downstream the next.
struct CorridorMap {
    std::vector<Segment> segments;
    double match_tolerance_m = 100.0;

    int index_of(const std::string& id) const;
    int upstream_of(int idx) const;
    int downstream_of(int idx) const;

    LatLon segment_midpoint(int idx) const;

    void validate() const;  // throws DataError on broken invariants

    void save(const std::string& path) const;
    static CorridorMap load(const std::string& path);

private:
    mutable std::unordered_map<std::string, int> id_index_;
};

enum class SliceMode {
    equal_arc_length,  // cuts at equal distance along the centerline
    coordinate,        // cuts at equal longitude steps; lengths vary
};

// Slice one centerline into directional segments for both directions.
// EB follows the centerline order, WB the reverse. n_slices cuts per
// direction, so the map holds 2 * n_slices segments.
CorridorMap slice_corridor(const std::vector<LatLon>& centerline, int n_slices,
                           SliceMode mode, double match_tolerance_m);

}  // namespace cvrisk
