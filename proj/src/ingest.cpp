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

#include "qrc/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qrc/hash.hpp"

namespace qrc {

namespace timeutil {

std::string format_timestamp(Timestamp t) {
    const Civil c = civil_from_timestamp(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02u:%02u", c.year, c.month, c.day, c.hour,
                  c.minute);
    return buf;
}

Timestamp parse_timestamp(const std::string& s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d %d:%d:%d", &y, &mo, &d, &h, &mi, &sec) >= 5)
        return make_timestamp(y, static_cast<unsigned>(mo), static_cast<unsigned>(d),
                              static_cast<unsigned>(h), static_cast<unsigned>(mi),
                              static_cast<unsigned>(sec));
    if (std::sscanf(s.c_str(), "%d/%d/%d %d:%d", &mo, &d, &y, &h, &mi) == 5)
        return make_timestamp(y, static_cast<unsigned>(mo), static_cast<unsigned>(d),
                              static_cast<unsigned>(h), static_cast<unsigned>(mi));
    throw std::invalid_argument("unparseable datetime: \"" + s + "\"");
}

}  // namespace timeutil

namespace ingest {

namespace {

constexpr std::array<const char*, 9> kCsvColumns = {
    "DateTime",      "Temperature",
    "Humidity",      "Wind Speed",
    "general diffuse flows", "diffuse flows",
    "Zone 1 Power Consumption", "Zone 2 Power Consumption",
    "Zone 3 Power Consumption"};

std::string normalize_header_cell(const std::string& raw) {
    std::string out;
    bool in_space = true;  // also trims leading whitespace
    for (char ch : raw) {
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '"') {
            if (ch == '"') continue;
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(ch);
    }
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_field(const std::string& cell, std::size_t row, const char* column) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        // allow trailing spaces only
        for (std::size_t i = pos; i < cell.size(); ++i)
            if (cell[i] != ' ' && cell[i] != '\t') throw std::invalid_argument("trailing junk");
        if (!std::isfinite(v)) throw std::invalid_argument("not finite");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("row " + std::to_string(row) + ": cannot parse " +
                                    std::string(column) + " value \"" + cell + "\"");
    }
}

double mean_of(const std::vector<const RawRecord*>& rs, double RawRecord::* field) {
    double s = 0;
    for (const auto* r : rs) s += r->*field;
    return s / static_cast<double>(rs.size());
}

}  // namespace

std::string split_name(SplitTag tag) {
    switch (tag) {
        case SplitTag::full: return "full";
        case SplitTag::train: return "train";
        case SplitTag::val: return "val";
        case SplitTag::test: return "test";
    }
    return "?";
}

std::vector<RawRecord> parse_raw_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open data file: " + path);

    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty data file: " + path);
    const auto header = split_csv_line(line);
    std::vector<std::string> names(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) names[i] = normalize_header_cell(header[i]);

    std::array<std::size_t, 9> idx{};
    for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
        const auto it = std::find(names.begin(), names.end(), kCsvColumns[c]);
        if (it == names.end())
            throw std::invalid_argument("schema error: missing column \"" +
                                        std::string(kCsvColumns[c]) + "\" in " + path);
        idx[c] = static_cast<std::size_t>(it - names.begin());
    }

    std::vector<RawRecord> records;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < names.size())
            throw std::invalid_argument("row " + std::to_string(row) + ": expected " +
                                        std::to_string(names.size()) + " fields, got " +
                                        std::to_string(cells.size()));
        RawRecord r;
        try {
            r.timestamp = timeutil::parse_timestamp(cells[idx[0]]);
        } catch (const std::exception& e) {
            throw std::invalid_argument("row " + std::to_string(row) + ": " + e.what());
        }
        r.temperature = parse_field(cells[idx[1]], row, "Temperature");
        r.humidity = parse_field(cells[idx[2]], row, "Humidity");
        r.wind_speed = parse_field(cells[idx[3]], row, "Wind Speed");
        r.general_diffuse_flows = parse_field(cells[idx[4]], row, "general diffuse flows");
        r.diffuse_flows = parse_field(cells[idx[5]], row, "diffuse flows");
        r.zone1_power = parse_field(cells[idx[6]], row, "Zone 1 Power Consumption");
        r.zone2_power = parse_field(cells[idx[7]], row, "Zone 2 Power Consumption");
        r.zone3_power = parse_field(cells[idx[8]], row, "Zone 3 Power Consumption");
        if (!records.empty() && r.timestamp <= records.back().timestamp)
            throw std::invalid_argument("row " + std::to_string(row) +
                                        ": timestamps not strictly increasing");
        records.push_back(r);
    }
    return records;
}

std::vector<RawRecord> resample_hourly(const std::vector<RawRecord>& records) {
    if (records.empty()) throw std::invalid_argument("resample_hourly: no records");

    std::vector<RawRecord> hourly;
    std::vector<const RawRecord*> bucket;
    std::int64_t bucket_hour = records.front().timestamp / timeutil::kSecondsPerHour;

    const auto flush = [&]() {
        RawRecord out;
        out.timestamp = bucket_hour * timeutil::kSecondsPerHour;
        out.temperature = mean_of(bucket, &RawRecord::temperature);
        out.humidity = mean_of(bucket, &RawRecord::humidity);
        out.wind_speed = mean_of(bucket, &RawRecord::wind_speed);
        out.general_diffuse_flows = mean_of(bucket, &RawRecord::general_diffuse_flows);
        out.diffuse_flows = mean_of(bucket, &RawRecord::diffuse_flows);
        out.zone1_power = mean_of(bucket, &RawRecord::zone1_power);
        out.zone2_power = mean_of(bucket, &RawRecord::zone2_power);
        out.zone3_power = mean_of(bucket, &RawRecord::zone3_power);
        hourly.push_back(out);
        bucket.clear();
    };

    for (const auto& r : records) {
        const std::int64_t hour = r.timestamp / timeutil::kSecondsPerHour;
        if (hour != bucket_hour) {
            flush();
            if (hour != bucket_hour + 1)
                throw std::runtime_error(
                    "resample_hourly: no records for hour starting " +
                    timeutil::format_timestamp((bucket_hour + 1) * timeutil::kSecondsPerHour));
            bucket_hour = hour;
        }
        bucket.push_back(&r);
    }
    flush();
    return hourly;
}

FeatureFrame engineer_features(const std::vector<RawRecord>& hourly) {
    constexpr int kLag = 24;
    if (hourly.size() < kLag + 1)
        throw std::invalid_argument("engineer_features: need at least 25 hourly rows, got " +
                                    std::to_string(hourly.size()));

    const std::size_t n = hourly.size() - kLag;
    FeatureFrame frame;
    frame.timestamps.resize(n);
    frame.features = Matrix(n, kNumFeatures);
    frame.target.resize(n);

    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        const RawRecord& r = hourly[i + kLag];
        frame.timestamps[i] = r.timestamp;
        frame.target[i] = r.zone1_power;
        const double hour = timeutil::hour_of_day(r.timestamp);
        const double dow = timeutil::day_of_week(r.timestamp);
        double* row = frame.features.row(i);
        row[0] = r.temperature;
        row[1] = r.humidity;
        row[2] = r.wind_speed;
        row[3] = r.general_diffuse_flows;
        row[4] = r.diffuse_flows;
        row[5] = std::sin(two_pi * hour / 24.0);
        row[6] = std::cos(two_pi * hour / 24.0);
        row[7] = std::sin(two_pi * dow / 7.0);
        row[8] = std::cos(two_pi * dow / 7.0);
        row[9] = hourly[i + kLag - 1].zone1_power;
        row[10] = hourly[i].zone1_power;
    }
    return frame;
}

SplitFrames chronological_split(const FeatureFrame& frame, double train_ratio, double val_ratio,
                                double test_ratio) {
    if (std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
        throw std::invalid_argument("chronological_split: ratios must sum to 1");
    const auto n = static_cast<double>(frame.size());
    // epsilon guards against 0.7*10 = 6.999... style floating-point dips
    const auto i1 = static_cast<std::size_t>(std::floor(train_ratio * n + 1e-6));
    const auto i2 = static_cast<std::size_t>(std::floor((train_ratio + val_ratio) * n + 1e-6));
    if (i1 == 0 || i2 <= i1 || i2 >= frame.size())
        throw std::invalid_argument("chronological_split: a split would be empty (n=" +
                                    std::to_string(frame.size()) + ")");

    const auto slice = [&](std::size_t lo, std::size_t hi, SplitTag tag) {
        FeatureFrame out;
        out.split = tag;
        out.timestamps.assign(frame.timestamps.begin() + static_cast<std::ptrdiff_t>(lo),
                              frame.timestamps.begin() + static_cast<std::ptrdiff_t>(hi));
        out.target.assign(frame.target.begin() + static_cast<std::ptrdiff_t>(lo),
                          frame.target.begin() + static_cast<std::ptrdiff_t>(hi));
        out.features = Matrix(hi - lo, kNumFeatures);
        for (std::size_t i = lo; i < hi; ++i)
            std::copy(frame.features.row(i), frame.features.row(i) + kNumFeatures,
                      out.features.row(i - lo));
        return out;
    };
    return SplitFrames{slice(0, i1, SplitTag::train), slice(i1, i2, SplitTag::val),
                       slice(i2, frame.size(), SplitTag::test)};
}

ScalerState fit_minmax(const FeatureFrame& train) {
    if (train.split != SplitTag::train)
        throw std::invalid_argument("fit_minmax: scaler must be fit on the training split, got " +
                                    split_name(train.split));
    if (train.size() == 0) throw std::invalid_argument("fit_minmax: empty frame");

    ScalerState s;
    s.feature_min.assign(kNumFeatures, 0);
    s.feature_max.assign(kNumFeatures, 0);
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        double lo = train.features(0, j), hi = lo;
        for (std::size_t i = 1; i < train.size(); ++i) {
            lo = std::min(lo, train.features(i, j));
            hi = std::max(hi, train.features(i, j));
        }
        if (hi <= lo)
            throw std::runtime_error("fit_minmax: constant column \"" +
                                     std::string(kFeatureNames[j]) + "\"");
        s.feature_min[j] = lo;
        s.feature_max[j] = hi;
    }
    const auto [lo_it, hi_it] = std::minmax_element(train.target.begin(), train.target.end());
    if (*hi_it <= *lo_it) throw std::runtime_error("fit_minmax: constant column \"target\"");
    s.target_min = *lo_it;
    s.target_max = *hi_it;
    return s;
}

ScaledFrame apply_minmax(const FeatureFrame& frame, const ScalerState& scaler) {
    ScaledFrame out;
    out.split = frame.split;
    out.timestamps = frame.timestamps;
    out.target_raw = frame.target;
    out.features = Matrix(frame.size(), kNumFeatures);
    out.target_scaled.resize(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        for (std::size_t j = 0; j < kNumFeatures; ++j)
            out.features(i, j) = (frame.features(i, j) - scaler.feature_min[j]) /
                                 (scaler.feature_max[j] - scaler.feature_min[j]);
        out.target_scaled[i] = scale_target(frame.target[i], scaler);
    }
    return out;
}

double scale_target(double y_raw, const ScalerState& scaler) {
    return (y_raw - scaler.target_min) / (scaler.target_max - scaler.target_min);
}

double invert_target(double y_scaled, const ScalerState& scaler) {
    return y_scaled * (scaler.target_max - scaler.target_min) + scaler.target_min;
}

std::vector<WindowSample> make_windows(const ScaledFrame& frame, int T) {
    if (T < 1) throw std::invalid_argument("make_windows: T must be >= 1");
    if (frame.size() <= static_cast<std::size_t>(T))
        throw std::invalid_argument("make_windows: need more than " + std::to_string(T) +
                                    " rows, got " + std::to_string(frame.size()));
    const std::size_t count = frame.size() - static_cast<std::size_t>(T);
    std::vector<WindowSample> windows(count);
    for (std::size_t i = 0; i < count; ++i) {
        WindowSample& w = windows[i];
        w.inputs = Matrix(static_cast<std::size_t>(T), kNumFeatures);
        for (std::size_t tau = 0; tau < static_cast<std::size_t>(T); ++tau)
            std::copy(frame.features.row(i + tau), frame.features.row(i + tau) + kNumFeatures,
                      w.inputs.row(tau));
        const std::size_t tgt = i + static_cast<std::size_t>(T);
        w.target_scaled = frame.target_scaled[tgt];
        w.target_raw = frame.target_raw[tgt];
        w.target_timestamp = frame.timestamps[tgt];
    }
    return windows;
}

std::uint64_t hash_records(const std::vector<RawRecord>& records) {
    Hasher h;
    for (const auto& r : records) {
        h.update_u64(static_cast<std::uint64_t>(r.timestamp));
        h.update_double(r.temperature);
        h.update_double(r.humidity);
        h.update_double(r.wind_speed);
        h.update_double(r.general_diffuse_flows);
        h.update_double(r.diffuse_flows);
        h.update_double(r.zone1_power);
        h.update_double(r.zone2_power);
        h.update_double(r.zone3_power);
    }
    return h.digest();
}

std::uint64_t hash_windows(const std::vector<WindowSample>& windows) {
    Hasher h;
    h.update_u64(windows.size());
    for (const auto& w : windows) {
        h.update_doubles(w.inputs.data);
        h.update_double(w.target_scaled);
        h.update_double(w.target_raw);
        h.update_u64(static_cast<std::uint64_t>(w.target_timestamp));
    }
    return h.digest();
}

}  // namespace ingest
}  // namespace qrc
