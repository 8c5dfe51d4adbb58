#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cvrisk/dataset.hpp"
#include "cvrisk/ingest.hpp"

namespace cvrisk {

struct FeatureParams {
    int bin_seconds = 300;
    double speed_thres_kmh = 160.9;    // super-speeding records
    double accel_thres_ms2 = 3.4;      // hard accel / hard brake, per vehicle
    int n_lags = 3;                    // t1..t3 previous-interval blocks
    int crash_exclusion_bins = 0;      // drop this many non-crash bins after a crash
};

// Per-bin traffic features. Speeds in km/h, accelerations in m/s^2.
// dcc_cal is stored signed (<= 0); max_dcc is a magnitude.
struct CoreFeatures {
    double mean_speed = 0.0;
    double max_speed = 0.0;
    double ss = 0.0;  // population standard deviation of speed
    double veh_cnt = 0.0;
    double speed_cnt_thres = 0.0;
    double acc_cal = 0.0;
    double dcc_cal = 0.0;
    double max_acc = 0.0;
    double max_dcc = 0.0;
    double acc_cnt_thres = 0.0;
    double dcc_cnt_thres = 0.0;
};

struct ContextBlock {
    CoreFeatures core;
    int missing = 1;  // 1 when the neighbor/lag bin does not exist
};

struct SegmentBinRecord {
    int segment_index = -1;
    std::string segment_id;
    std::int64_t bin_start = 0;  // multiple of bin_seconds
    CoreFeatures core;
    double timeofday = 0.0;     // hour of day, 0..23 UTC
    double dist_seg = 0.0;      // segment length, miles
    double up_time_diff = 0.0;  // bin_start minus latest upstream ping time
    ContextBlock u1, d1;
    std::vector<ContextBlock> lags;  // t1..tn
    double temperature = 0.0;
    double precipitation = 0.0;
    int crash_check = 0;
};

using BinKey = std::pair<int, std::int64_t>;  // (segment index, bin start)

std::int64_t bin_start_of(std::int64_t timestamp, int bin_seconds);

// Groups matched pings into (segment, bin) buckets; empty bins are absent.
std::map<BinKey, std::vector<MatchedPing>> bin_pings(std::span<const MatchedPing> pings,
                                                     int bin_seconds);

// Pairwise speed differences of one vehicle's time-sorted pings, m/s^2.
// Pairs with zero time difference are skipped.
std::vector<double> per_vehicle_accels(std::span<const VehiclePing> pings);

CoreFeatures compute_core_features(const std::vector<MatchedPing>& group,
                                   const FeatureParams& params);

// Core features plus u1/d1/t1..tn context blocks and up_time_diff.
std::vector<SegmentBinRecord> build_records(const std::map<BinKey, std::vector<MatchedPing>>& bins,
                                            const CorridorMap& map, const FeatureParams& params);

struct LabelReport {
    std::size_t crashes_total = 0;
    std::size_t crashes_flagged = 0;
    std::size_t crashes_unmatched = 0;     // outside corridor tolerance
    std::size_t crashes_in_empty_bins = 0; // matched a segment but no record exists
    std::size_t records_excluded = 0;      // post-crash exclusion window
};

void join_weather_and_labels(std::vector<SegmentBinRecord>& records,
                             const std::vector<WeatherRecord>& weather,
                             const std::vector<WeatherStation>& stations,
                             const std::vector<CrashRecord>& crashes,
                             const CorridorMatcher& matcher, const FeatureParams& params,
                             LabelReport* report = nullptr);

// Fixed column order: core block, u1, d1, t1..tn blocks (12 features each,
// cvs derived as ss / mean_speed), then timeofday, dist_seg, up_time_diff,
// temperature, precipitation, then one missing flag per context block.
LabeledDataset to_dataset(const std::vector<SegmentBinRecord>& records, int n_lags = 3);

std::vector<std::string> block_feature_names();
std::vector<std::string> dataset_feature_names(int n_lags = 3);

enum class PruneMode { none, paper, auto_importance };

PruneMode prune_mode_from_name(const std::string& s);

struct PruneAutoConfig {
    int rf_n_trees = 50;
    int rf_max_depth = 12;
    int n_repeats = 5;
    std::uint64_t seed = 1;
};

// mode=paper drops the count-threshold, temperature and cvs columns in every
// block; mode=auto_importance drops features with negative permutation
// importance under a random-forest fit.
LabeledDataset prune_features(const LabeledDataset& ds, PruneMode mode,
                              const PruneAutoConfig& auto_cfg = {});

}  // namespace cvrisk
