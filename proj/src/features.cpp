#include "cvrisk/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "cvrisk/csv.hpp"

namespace cvrisk {

std::int64_t bin_start_of(std::int64_t timestamp, int bin_seconds) {
    std::int64_t b = bin_seconds;
    std::int64_t q = timestamp / b;
    if (timestamp % b != 0 && timestamp < 0) --q;  // floor for negative times
    return q * b;
}

std::map<BinKey, std::vector<MatchedPing>> bin_pings(std::span<const MatchedPing> pings,
                                                     int bin_seconds) {
    std::map<BinKey, std::vector<MatchedPing>> bins;
    for (const auto& mp : pings) {
        bins[{mp.segment_index, bin_start_of(mp.ping.timestamp, bin_seconds)}].push_back(mp);
    }
    return bins;
}

std::vector<double> per_vehicle_accels(std::span<const VehiclePing> pings) {
    std::vector<double> out;
    if (pings.size() < 2) return out;
    out.reserve(pings.size() - 1);
    for (std::size_t i = 1; i < pings.size(); ++i) {
        auto td = static_cast<double>(pings[i].timestamp - pings[i - 1].timestamp);
        if (td <= 0.0) continue;
        double dv_ms = (pings[i].speed_kmh - pings[i - 1].speed_kmh) * kKmhToMs;
        out.push_back(dv_ms / td);
    }
    return out;
}

CoreFeatures compute_core_features(const std::vector<MatchedPing>& group,
                                   const FeatureParams& params) {
    if (group.empty()) throw DataError("core features need a nonempty ping group");

    // Sort a copy so the result is invariant to input order.
    std::vector<const MatchedPing*> sorted;
    sorted.reserve(group.size());
    for (const auto& mp : group) sorted.push_back(&mp);
    std::sort(sorted.begin(), sorted.end(), [](const MatchedPing* a, const MatchedPing* b) {
        if (a->ping.vehicle_id != b->ping.vehicle_id) return a->ping.vehicle_id < b->ping.vehicle_id;
        if (a->ping.timestamp != b->ping.timestamp) return a->ping.timestamp < b->ping.timestamp;
        return a->ping.speed_kmh < b->ping.speed_kmh;
    });

    CoreFeatures f;
    double sum = 0.0, sum_sq = 0.0;
    for (const auto* mp : sorted) {
        double v = mp->ping.speed_kmh;
        sum += v;
        sum_sq += v * v;
        f.max_speed = std::max(f.max_speed, v);
        if (v > params.speed_thres_kmh) f.speed_cnt_thres += 1.0;
    }
    auto n = static_cast<double>(sorted.size());
    f.mean_speed = sum / n;
    double var = sum_sq / n - f.mean_speed * f.mean_speed;
    f.ss = var > 0.0 ? std::sqrt(var) : 0.0;

    double acc_sum = 0.0, dcc_sum = 0.0;
    std::size_t acc_n = 0, dcc_n = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j]->ping.vehicle_id == sorted[i]->ping.vehicle_id) ++j;
        f.veh_cnt += 1.0;

        std::vector<VehiclePing> trace;
        trace.reserve(j - i);
        for (std::size_t k = i; k < j; ++k) trace.push_back(sorted[k]->ping);
        auto accels = per_vehicle_accels(trace);

        bool hard_acc = false, hard_dcc = false;
        for (double a : accels) {
            if (a > 0.0) {
                acc_sum += a;
                ++acc_n;
                f.max_acc = std::max(f.max_acc, a);
                if (a > params.accel_thres_ms2) hard_acc = true;
            } else if (a < 0.0) {
                dcc_sum += a;
                ++dcc_n;
                f.max_dcc = std::max(f.max_dcc, -a);
                if (-a > params.accel_thres_ms2) hard_dcc = true;
            }
        }
        if (hard_acc) f.acc_cnt_thres += 1.0;
        if (hard_dcc) f.dcc_cnt_thres += 1.0;
        i = j;
    }
    f.acc_cal = acc_n ? acc_sum / static_cast<double>(acc_n) : 0.0;
    f.dcc_cal = dcc_n ? dcc_sum / static_cast<double>(dcc_n) : 0.0;
    return f;
}

std::vector<SegmentBinRecord> build_records(const std::map<BinKey, std::vector<MatchedPing>>& bins,
                                            const CorridorMap& map, const FeatureParams& params) {
    std::map<BinKey, CoreFeatures> core;
    std::map<BinKey, std::int64_t> latest_ts;
    for (const auto& [key, group] : bins) {
        core[key] = compute_core_features(group, params);
        std::int64_t latest = std::numeric_limits<std::int64_t>::min();
        for (const auto& mp : group) latest = std::max(latest, mp.ping.timestamp);
        latest_ts[key] = latest;
    }

    auto lookup = [&core](int seg, std::int64_t bin) -> ContextBlock {
        ContextBlock b;
        if (seg >= 0) {
            auto it = core.find({seg, bin});
            if (it != core.end()) {
                b.core = it->second;
                b.missing = 0;
            }
        }
        return b;
    };

    std::vector<SegmentBinRecord> records;
    records.reserve(core.size());
    for (const auto& [key, cf] : core) {
        auto [seg, bin] = key;
        SegmentBinRecord r;
        r.segment_index = seg;
        r.segment_id = map.segments[seg].id;
        r.bin_start = bin;
        r.core = cf;
        std::int64_t day_sec = ((bin % 86400) + 86400) % 86400;
        r.timeofday = static_cast<double>(day_sec / 3600);
        r.dist_seg = map.segments[seg].length_miles;

        int up = map.upstream_of(seg);
        int down = map.downstream_of(seg);
        r.u1 = lookup(up, bin);
        r.d1 = lookup(down, bin);
        if (r.u1.missing == 0) {
            r.up_time_diff = static_cast<double>(bin - latest_ts.at({up, bin}));
        }
        r.lags.reserve(params.n_lags);
        for (int k = 1; k <= params.n_lags; ++k) {
            r.lags.push_back(lookup(seg, bin - static_cast<std::int64_t>(k) * params.bin_seconds));
        }
        records.push_back(std::move(r));
    }
    return records;
}

namespace {

// Nearest station by great-circle distance to the segment midpoint.
int nearest_station(const std::vector<WeatherStation>& stations, const LatLon& point) {
    int best = -1;
    double best_d = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < stations.size(); ++i) {
        double d = haversine_m(stations[i].location, point);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace

void join_weather_and_labels(std::vector<SegmentBinRecord>& records,
                             const std::vector<WeatherRecord>& weather,
                             const std::vector<WeatherStation>& stations,
                             const std::vector<CrashRecord>& crashes,
                             const CorridorMatcher& matcher, const FeatureParams& params,
                             LabelReport* report) {
    LabelReport local;
    LabelReport& rep = report ? *report : local;
    const CorridorMap& map = matcher.map();

    // Index weather by station, hours sorted for nearest-hour fallback.
    std::unordered_map<std::string, std::vector<const WeatherRecord*>> by_station;
    for (const auto& w : weather) by_station[w.station_id].push_back(&w);
    for (auto& [id, recs] : by_station) {
        std::sort(recs.begin(), recs.end(),
                  [](const WeatherRecord* a, const WeatherRecord* b) { return a->hour_start < b->hour_start; });
    }

    std::vector<WeatherStation> known_stations = stations;
    if (known_stations.empty()) {
        if (by_station.size() > 1) {
            throw DataError("multiple weather stations but no station coordinates given");
        }
        for (const auto& [id, recs] : by_station) {
            known_stations.push_back({id, LatLon{}});
        }
    }

    std::vector<int> station_of_segment(map.segments.size(), -1);
    for (std::size_t s = 0; s < map.segments.size(); ++s) {
        station_of_segment[s] =
            nearest_station(known_stations, map.segment_midpoint(static_cast<int>(s)));
    }

    auto weather_at = [&](int seg, std::int64_t bin) -> const WeatherRecord* {
        if (!weather.empty() && station_of_segment[seg] >= 0) {
            const auto& sid = known_stations[station_of_segment[seg]].station_id;
            auto it = by_station.find(sid);
            if (it == by_station.end() || it->second.empty()) return nullptr;
            const auto& recs = it->second;
            std::int64_t hour = (bin / 3600) * 3600;
            // binary search, then pick the closer of the two neighbors
            auto lo = std::lower_bound(recs.begin(), recs.end(), hour,
                                       [](const WeatherRecord* w, std::int64_t h) { return w->hour_start < h; });
            if (lo == recs.end()) return recs.back();
            if (lo == recs.begin()) return recs.front();
            auto prev = std::prev(lo);
            return (hour - (*prev)->hour_start) <= ((*lo)->hour_start - hour) ? *prev : *lo;
        }
        return nullptr;
    };

    std::map<BinKey, std::size_t> record_index;
    for (std::size_t i = 0; i < records.size(); ++i) {
        record_index[{records[i].segment_index, records[i].bin_start}] = i;
    }

    for (auto& r : records) {
        if (const WeatherRecord* w = weather_at(r.segment_index, r.bin_start)) {
            r.temperature = w->temperature_f;
            r.precipitation = w->precipitation_mm;
        }
        r.crash_check = 0;
    }

    std::vector<BinKey> crash_bins;
    rep.crashes_total = crashes.size();
    for (const auto& c : crashes) {
        auto m = matcher.match({c.lat, c.lon}, c.direction);
        if (!m) {
            ++rep.crashes_unmatched;
            continue;
        }
        BinKey key{m->segment_index, bin_start_of(c.timestamp, params.bin_seconds)};
        auto it = record_index.find(key);
        if (it == record_index.end()) {
            ++rep.crashes_in_empty_bins;
            continue;
        }
        records[it->second].crash_check = 1;
        ++rep.crashes_flagged;
        crash_bins.push_back(key);
    }

    if (params.crash_exclusion_bins > 0 && !crash_bins.empty()) {
        std::vector<char> drop(records.size(), 0);
        for (const auto& [seg, bin] : crash_bins) {
            for (int k = 1; k <= params.crash_exclusion_bins; ++k) {
                auto it = record_index.find({seg, bin + static_cast<std::int64_t>(k) * params.bin_seconds});
                if (it != record_index.end() && records[it->second].crash_check == 0) {
                    drop[it->second] = 1;
                }
            }
        }
        std::vector<SegmentBinRecord> kept;
        kept.reserve(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (drop[i]) {
                ++rep.records_excluded;
            } else {
                kept.push_back(std::move(records[i]));
            }
        }
        records = std::move(kept);
    }
}

std::vector<std::string> block_feature_names() {
    return {"mean_speed", "max_speed", "ss",      "cvs",     "veh_cnt",       "speed_cnt_thres",
            "acc_cal",    "dcc_cal",   "max_acc", "max_dcc", "acc_cnt_thres", "dcc_cnt_thres"};
}

namespace {

std::vector<std::string> block_prefixes(int n_lags) {
    std::vector<std::string> p{"", "u1_", "d1_"};
    for (int k = 1; k <= n_lags; ++k) p.push_back("t" + std::to_string(k) + "_");
    return p;
}

void emit_block(std::vector<double>& row, const CoreFeatures& c) {
    double cvs = c.mean_speed != 0.0 ? c.ss / c.mean_speed : 0.0;
    row.insert(row.end(), {c.mean_speed, c.max_speed, c.ss, cvs, c.veh_cnt, c.speed_cnt_thres,
                           c.acc_cal, c.dcc_cal, c.max_acc, c.max_dcc, c.acc_cnt_thres,
                           c.dcc_cnt_thres});
}

}  // namespace

std::vector<std::string> dataset_feature_names(int n_lags) {
    std::vector<std::string> names;
    auto block = block_feature_names();
    for (const auto& prefix : block_prefixes(n_lags)) {
        for (const auto& b : block) names.push_back(prefix + b);
    }
    names.insert(names.end(), {"timeofday", "dist_seg", "up_time_diff", "temperature", "precipitation"});
    names.push_back("u1_missing");
    names.push_back("d1_missing");
    for (int k = 1; k <= n_lags; ++k) names.push_back("t" + std::to_string(k) + "_missing");
    return names;
}

LabeledDataset to_dataset(const std::vector<SegmentBinRecord>& records, int n_lags) {
    LabeledDataset ds;
    ds.feature_names = dataset_feature_names(n_lags);
    ds.values.reserve(records.size() * ds.n_cols());

    std::vector<double> row;
    for (const auto& r : records) {
        if (static_cast<int>(r.lags.size()) != n_lags) {
            throw DataError("record has " + std::to_string(r.lags.size()) + " lag blocks, expected " +
                            std::to_string(n_lags));
        }
        row.clear();
        emit_block(row, r.core);
        emit_block(row, r.u1.core);
        emit_block(row, r.d1.core);
        for (const auto& lag : r.lags) emit_block(row, lag.core);
        row.insert(row.end(), {r.timeofday, r.dist_seg, r.up_time_diff, r.temperature, r.precipitation});
        row.push_back(static_cast<double>(r.u1.missing));
        row.push_back(static_cast<double>(r.d1.missing));
        for (const auto& lag : r.lags) row.push_back(static_cast<double>(lag.missing));
        ds.append_row(row, r.crash_check, r.segment_id, r.bin_start);
    }
    ds.validate();
    return ds;
}

PruneMode prune_mode_from_name(const std::string& s) {
    if (s == "none") return PruneMode::none;
    if (s == "paper") return PruneMode::paper;
    if (s == "auto") return PruneMode::auto_importance;
    throw DataError("unknown prune mode: " + s + " (expected none, paper, or auto)");
}

}  // namespace cvrisk
