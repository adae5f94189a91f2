// Copyright 2026 The qrc-forecast authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qrc/common.hpp"

namespace qrc::ingest {

/// One row of the Tetouan CSV (10-minute cadence). Zones 2 and 3 are parsed
/// for schema fidelity but never used downstream.
struct RawRecord {
    Timestamp timestamp = 0;
    double temperature = 0;
    double humidity = 0;
    double wind_speed = 0;
    double general_diffuse_flows = 0;
    double diffuse_flows = 0;
    double zone1_power = 0;
    double zone2_power = 0;
    double zone3_power = 0;
};

enum class SplitTag { full, train, val, test };

std::string split_name(SplitTag tag);

/// The 11 engineered input columns, in the fixed order used everywhere:
/// 5 weather readings, hour-of-day and day-of-week sine/cosine pairs, and
/// 1-hour / 24-hour lags of the target.
inline constexpr std::array<const char*, 11> kFeatureNames = {
    "temperature", "humidity",   "wind_speed", "general_diffuse_flows",
    "diffuse_flows", "sin_hour", "cos_hour",   "sin_dow",
    "cos_dow",     "lag1_power", "lag24_power"};

inline constexpr std::size_t kNumFeatures = 11;

/// Hourly feature matrix plus the raw (unscaled) Zone 1 target.
struct FeatureFrame {
    SplitTag split = SplitTag::full;
    std::vector<Timestamp> timestamps;
    Matrix features;             // n x 11
    std::vector<double> target;  // physical units

    std::size_t size() const { return timestamps.size(); }
};

/// Per-column min/max fit on the training split only. Feature columns and the
/// target are scaled independently.
struct ScalerState {
    std::vector<double> feature_min, feature_max;  // length 11
    double target_min = 0, target_max = 1;
};

/// FeatureFrame after min-max scaling. Keeps the raw target alongside the
/// scaled one so evaluation can report physical units without a scaler in
/// hand.
struct ScaledFrame {
    SplitTag split = SplitTag::full;
    std::vector<Timestamp> timestamps;
    Matrix features;  // scaled; val/test may fall outside [0,1]
    std::vector<double> target_scaled;
    std::vector<double> target_raw;

    std::size_t size() const { return timestamps.size(); }
};

/// One supervised sample: a T x 11 window of scaled features and the target
/// one step past the window.
struct WindowSample {
    Matrix inputs;  // T x 11
    double target_scaled = 0;
    double target_raw = 0;
    Timestamp target_timestamp = 0;
};

inline constexpr int kWindowLength = 24;

/// Parses the Tetouan CSV. Header matching is whitespace-tolerant (runs of
/// spaces collapse) but case-sensitive; a missing or renamed column raises a
/// schema error naming it, bad numerics raise a row-indexed parse error.
std::vector<RawRecord> parse_raw_csv(const std::string& path);

/// Collapses 10-minute records to hourly means. An empty hour between the
/// first and last record is a hard error; this dataset is complete and
/// silent imputation would corrupt the study.
std::vector<RawRecord> resample_hourly(const std::vector<RawRecord>& records);

/// Builds the 11 feature columns and drops the first 24 rows (undefined
/// 24-hour lag).
FeatureFrame engineer_features(const std::vector<RawRecord>& hourly);

struct SplitFrames {
    FeatureFrame train, val, test;
};

/// Contiguous chronological partition at floor(r0*n) and floor((r0+r1)*n).
SplitFrames chronological_split(const FeatureFrame& frame, double train_ratio = 0.70,
                                double val_ratio = 0.10, double test_ratio = 0.20);

/// Rejects frames not tagged as the training split: scaling statistics from
/// validation or test rows would leak future information.
ScalerState fit_minmax(const FeatureFrame& train);

ScaledFrame apply_minmax(const FeatureFrame& frame, const ScalerState& scaler);

double scale_target(double y_raw, const ScalerState& scaler);
double invert_target(double y_scaled, const ScalerState& scaler);

/// Sliding windows of length T with stride 1, built within one split only so
/// no window straddles a split boundary. Window i covers rows [i, i+T),
/// target is row i+T; yields n_rows - T samples.
std::vector<WindowSample> make_windows(const ScaledFrame& frame, int T = kWindowLength);

/// Content hash over timestamps and all numeric fields.
std::uint64_t hash_records(const std::vector<RawRecord>& records);

std::uint64_t hash_windows(const std::vector<WindowSample>& windows);

}  // namespace qrc::ingest
