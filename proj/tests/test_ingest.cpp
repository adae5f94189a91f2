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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "qrc/ingest.hpp"
#include "qrc/rng.hpp"
#include "qrc/synthdata.hpp"

using namespace qrc;
using namespace qrc::ingest;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream os(path, std::ios::trunc);
    os << content;
    return path;
}

constexpr const char* kHeader =
    "DateTime,Temperature,Humidity,Wind Speed,general diffuse flows,diffuse flows,"
    "Zone 1 Power Consumption,Zone 2  Power Consumption,Zone 3  Power Consumption\n";

/// Hourly records with a controllable zone1 sequence; other fields vary but
/// stay non-constant.
std::vector<RawRecord> make_hourly(std::size_t n, std::uint64_t seed = 1) {
    Rng rng(seed);
    std::vector<RawRecord> out(n);
    const Timestamp start = timeutil::make_timestamp(2017, 1, 1, 0, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = out[i];
        r.timestamp = start + static_cast<Timestamp>(i) * 3600;
        r.temperature = 15.0 + 10.0 * rng.uniform();
        r.humidity = 40.0 + 50.0 * rng.uniform();
        r.wind_speed = rng.uniform(0.1, 5.0);
        r.general_diffuse_flows = rng.uniform(0.0, 400.0);
        r.diffuse_flows = rng.uniform(0.0, 150.0);
        r.zone1_power = 30000.0 + 5000.0 * rng.gaussian();
        r.zone2_power = 20000.0 + 2000.0 * rng.gaussian();
        r.zone3_power = 12000.0 + 1000.0 * rng.gaussian();
    }
    return out;
}

}  // namespace

TEST_CASE("parse well-formed rows in order") {
    const auto path = write_temp("qrc_parse_ok.csv",
                                 std::string(kHeader) +
                                     "1/1/2017 0:00,6.5,73.8,0.08,0.05,0.12,34055.7,16128.9,20240.96\n"
                                     "1/1/2017 0:10,6.4,74.5,0.08,0.07,0.09,29814.7,19375.0,20131.08\n"
                                     "1/1/2017 0:20,6.3,74.5,0.08,0.06,0.08,29128.1,19006.7,19668.43\n");
    const auto records = parse_raw_csv(path);
    REQUIRE(records.size() == 3);
    CHECK(records[0].temperature == doctest::Approx(6.5));
    CHECK(records[2].zone1_power == doctest::Approx(29128.1));
    CHECK(records[1].timestamp - records[0].timestamp == 600);
}

TEST_CASE("missing column is a schema error naming it") {
    const auto path = write_temp(
        "qrc_parse_missing.csv",
        "DateTime,Humidity,Wind Speed,general diffuse flows,diffuse flows,"
        "Zone 1 Power Consumption,Zone 2 Power Consumption,Zone 3 Power Consumption\n");
    CHECK_THROWS_WITH_AS(parse_raw_csv(path), doctest::Contains("Temperature"),
                         std::invalid_argument);
}

TEST_CASE("bad numeric is a row-indexed parse error") {
    const auto path = write_temp("qrc_parse_bad.csv",
                                 std::string(kHeader) +
                                     "1/1/2017 0:00,6.5,73.8,0.08,0.05,0.12,34055.7,1,2\n"
                                     "1/1/2017 0:10,oops,74.5,0.08,0.07,0.09,29814.7,1,2\n");
    CHECK_THROWS_WITH_AS(parse_raw_csv(path), doctest::Contains("row 2"), std::invalid_argument);
}

TEST_CASE("non-increasing timestamps rejected") {
    const auto path = write_temp("qrc_parse_ts.csv",
                                 std::string(kHeader) +
                                     "1/1/2017 0:10,6.5,73.8,0.08,0.05,0.12,1,1,1\n"
                                     "1/1/2017 0:10,6.4,74.5,0.08,0.07,0.09,2,2,2\n");
    CHECK_THROWS_WITH_AS(parse_raw_csv(path), doctest::Contains("increasing"),
                         std::invalid_argument);
}

TEST_CASE("whitespace-tolerant header matching") {
    const auto path = write_temp("qrc_parse_ws.csv",
                                 "DateTime, Temperature ,Humidity,Wind  Speed,"
                                 "general diffuse flows,diffuse flows,Zone 1 Power Consumption,"
                                 "Zone 2   Power Consumption,Zone 3 Power Consumption\n"
                                 "1/1/2017 0:00,1,2,3,4,5,6,7,8\n");
    CHECK(parse_raw_csv(path).size() == 1);
}

TEST_CASE("resample: hourly means over 10-minute cadence") {
    std::vector<RawRecord> records(12);
    const Timestamp start = timeutil::make_timestamp(2017, 3, 5, 10, 0);
    for (std::size_t i = 0; i < 12; ++i) {
        records[i].timestamp = start + static_cast<Timestamp>(i) * 600;
        records[i].temperature = (i < 6) ? 10.0 + static_cast<double>(i) : 20.0;
        records[i].zone1_power = 100.0 * static_cast<double>(i);
    }
    const auto hourly = resample_hourly(records);
    REQUIRE(hourly.size() == 2);
    CHECK(hourly[0].temperature == doctest::Approx(12.5));
    CHECK(hourly[1].temperature == doctest::Approx(20.0));
    CHECK(hourly[0].timestamp == start);
    CHECK(hourly[1].timestamp == start + 3600);
}

TEST_CASE("resample: missing hour is a hard error") {
    std::vector<RawRecord> records(12);
    const Timestamp start = timeutil::make_timestamp(2017, 3, 5, 10, 0);
    for (std::size_t i = 0; i < 12; ++i) {
        records[i].timestamp = start + static_cast<Timestamp>(i) * 600;
        if (i >= 6) records[i].timestamp += 3600;  // skip an hour
    }
    CHECK_THROWS_AS(resample_hourly(records), std::runtime_error);
}

TEST_CASE("resample conserves per-column sums") {
    const auto raw = synthdata::generate_records({.seed = 5, .days = 3});
    const auto hourly = resample_hourly(raw);
    REQUIRE(hourly.size() == raw.size() / 6);
    double raw_sum = 0, hourly_sum = 0;
    for (const auto& r : raw) raw_sum += r.zone1_power;
    for (const auto& h : hourly) hourly_sum += h.zone1_power * 6.0;
    CHECK(hourly_sum == doctest::Approx(raw_sum).epsilon(1e-6));
}

TEST_CASE("feature engineering: cyclical encodings and lags") {
    const auto hourly = make_hourly(36);
    const auto frame = engineer_features(hourly);
    REQUIRE(frame.size() == 12);  // 36 - 24
    REQUIRE(frame.features.cols == 11);

    // first retained row is hour 24 -> hour-of-day 0
    CHECK(frame.features(0, 5) == doctest::Approx(0.0));  // sin_hour
    CHECK(frame.features(0, 6) == doctest::Approx(1.0));  // cos_hour

    // sin_hour = 1 and cos_hour ~ 0 at hour-of-day 6
    bool checked = false;
    for (std::size_t i = 0; i < frame.size(); ++i) {
        if (timeutil::hour_of_day(frame.timestamps[i]) == 6) {
            CHECK(frame.features(i, 5) == doctest::Approx(1.0));
            CHECK(frame.features(i, 6) == doctest::Approx(0.0));
            checked = true;
        }
    }
    CHECK(checked);

    for (std::size_t i = 0; i < frame.size(); ++i) {
        CHECK(frame.features(i, 9) == hourly[i + 23].zone1_power);   // lag1
        CHECK(frame.features(i, 10) == hourly[i].zone1_power);      // lag24
        CHECK(frame.target[i] == hourly[i + 24].zone1_power);
    }
}

TEST_CASE("feature engineering needs at least 25 hourly rows") {
    CHECK_THROWS_AS(engineer_features(make_hourly(24)), std::invalid_argument);
    CHECK_NOTHROW(engineer_features(make_hourly(25)));
}

TEST_CASE("chronological split: sizes and ordering") {
    {
        const auto frame = engineer_features(make_hourly(34));  // 10 rows
        const auto s = chronological_split(frame);
        CHECK(s.train.size() == 7);
        CHECK(s.val.size() == 1);
        CHECK(s.test.size() == 2);
        CHECK(s.train.timestamps.back() < s.val.timestamps.front());
        CHECK(s.val.timestamps.back() < s.test.timestamps.front());
    }
    {
        const auto frame = engineer_features(make_hourly(8736 + 24));  // 8,736 rows
        const auto s = chronological_split(frame);
        CHECK(s.train.size() == 6115);
        CHECK(s.val.size() == 873);
        CHECK(s.test.size() == 1748);
    }
}

TEST_CASE("chronological split rejects bad ratios and empty splits") {
    const auto frame = engineer_features(make_hourly(40));
    CHECK_THROWS_AS(chronological_split(frame, 0.5, 0.2, 0.2), std::invalid_argument);
    const auto tiny = engineer_features(make_hourly(26));  // 2 rows: some split empty
    CHECK_THROWS_AS(chronological_split(tiny), std::invalid_argument);
}

TEST_CASE("min-max scaling and inversion") {
    auto frame = engineer_features(make_hourly(60));
    const auto splits = chronological_split(frame);
    const auto scaler = fit_minmax(splits.train);

    const auto scaled_train = apply_minmax(splits.train, scaler);
    for (std::size_t i = 0; i < scaled_train.size(); ++i)
        for (std::size_t j = 0; j < kNumFeatures; ++j) {
            CHECK(scaled_train.features(i, j) >= -1e-12);
            CHECK(scaled_train.features(i, j) <= 1.0 + 1e-12);
        }

    // round trip in physical units
    CHECK(invert_target(scale_target(3355.0, scaler), scaler) == doctest::Approx(3355.0));

    // out-of-range val/test values are preserved, not clipped
    ScalerState s;
    s.feature_min.assign(kNumFeatures, 2.0);
    s.feature_max.assign(kNumFeatures, 6.0);
    s.target_min = 2.0;
    s.target_max = 6.0;
    CHECK(scale_target(8.0, s) == doctest::Approx(1.5));
}

TEST_CASE("scaler refuses non-train frames and constant columns") {
    auto frame = engineer_features(make_hourly(60));
    const auto splits = chronological_split(frame);
    CHECK_THROWS_WITH_AS(fit_minmax(splits.val), doctest::Contains("train"),
                         std::invalid_argument);
    CHECK_THROWS_AS(fit_minmax(splits.test), std::invalid_argument);

    auto hourly = make_hourly(60);
    for (auto& r : hourly) r.wind_speed = 3.0;
    auto constant = engineer_features(hourly);
    const auto csplits = chronological_split(constant);
    CHECK_THROWS_WITH_AS(fit_minmax(csplits.train), doctest::Contains("wind_speed"),
                         std::runtime_error);
}

TEST_CASE("windows: count, stride-1 overlap, and target alignment") {
    auto frame = engineer_features(make_hourly(4 * 24 + 25));  // 97 rows
    frame.split = SplitTag::train;
    const auto scaler = fit_minmax(frame);
    const auto scaled = apply_minmax(frame, scaler);

    const auto windows = make_windows(scaled, 24);
    REQUIRE(windows.size() == scaled.size() - 24);
    for (std::size_t i = 0; i + 1 < windows.size(); ++i) {
        // consecutive windows share 23 rows
        for (std::size_t tau = 0; tau < 23; ++tau)
            for (std::size_t j = 0; j < kNumFeatures; ++j)
                CHECK(windows[i].inputs(tau + 1, j) == windows[i + 1].inputs(tau, j));
    }
    for (std::size_t i = 0; i < windows.size(); ++i) {
        CHECK(windows[i].target_scaled == scaled.target_scaled[i + 24]);
        // target is the step immediately after the window
        CHECK(windows[i].target_timestamp == scaled.timestamps[i + 23] + 3600);
    }
}

TEST_CASE("windows: single window from 25 rows, error at or below T rows") {
    // scaler fit on a week so day-of-week columns are not constant
    auto week = engineer_features(make_hourly(24 * 9));
    week.split = SplitTag::train;
    const auto scaler = fit_minmax(week);

    const auto frame = engineer_features(make_hourly(49));  // 25 rows
    const auto scaled = apply_minmax(frame, scaler);
    const auto windows = make_windows(scaled, 24);
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].target_raw == scaled.target_raw[24]);

    const auto small = engineer_features(make_hourly(48));  // 24 rows
    const auto small_scaled = apply_minmax(small, scaler);
    CHECK_THROWS_AS(make_windows(small_scaled, 24), std::invalid_argument);
}

TEST_CASE("6115 training rows give 6091 windows") {
    auto frame = engineer_features(make_hourly(6115 + 24));
    frame.split = SplitTag::train;
    const auto scaled = apply_minmax(frame, fit_minmax(frame));
    CHECK(make_windows(scaled, 24).size() == 6091);
}

TEST_CASE("timestamp helpers") {
    const Timestamp t = timeutil::make_timestamp(2017, 1, 2, 13, 0);  // a Monday
    CHECK(timeutil::day_of_week(t) == 0);
    CHECK(timeutil::hour_of_day(t) == 13);
    CHECK(timeutil::format_timestamp(t) == "2017-01-02 13:00");
    CHECK(timeutil::parse_timestamp("2017-01-02 13:00") == t);
    CHECK(timeutil::parse_timestamp("1/2/2017 13:00") == t);
    CHECK_THROWS_AS(timeutil::parse_timestamp("yesterday"), std::invalid_argument);
}

TEST_CASE("synthetic dataset matches the upstream shape end to end") {
    const auto records = synthdata::generate_records({.seed = 9, .days = 7});
    CHECK(records.size() == 7 * 144);
    const auto path = (std::filesystem::temp_directory_path() / "qrc_synth_week.csv").string();
    synthdata::write_csv(records, path);
    const auto parsed = parse_raw_csv(path);
    REQUIRE(parsed.size() == records.size());
    // CSV round trip is lossy only through the printf format
    CHECK(parsed[100].zone1_power == doctest::Approx(records[100].zone1_power).epsilon(1e-6));
    CHECK(parsed[100].timestamp == records[100].timestamp);
    const auto hourly = resample_hourly(parsed);
    CHECK(hourly.size() == parsed.size() / 6);
}
