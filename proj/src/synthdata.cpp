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

#include "qrc/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "qrc/rng.hpp"

namespace qrc::synthdata {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Ar1 {
    double phi;
    double sigma;
    double state = 0;

    double step(Rng& rng) {
        state = phi * state + sigma * rng.gaussian();
        return state;
    }
};

}  // namespace

std::vector<ingest::RawRecord> generate_records(const SynthParams& p) {
    const int n = p.days * 144;
    std::vector<ingest::RawRecord> records;
    records.reserve(static_cast<std::size_t>(n));

    Rng rng(p.seed);
    Ar1 temp_ar{0.995, 0.18};
    Ar1 hum_ar{0.99, 0.4};
    Ar1 wind_ar{0.998, 0.05};
    Ar1 cloud_ar{0.995, 0.03};
    Ar1 load_ar{p.noise_phi, p.noise_sigma};
    Ar1 z2_ar{0.99, 140.0};
    Ar1 z3_ar{0.99, 110.0};

    // burn-in so the AR processes start in their stationary regime
    for (int i = 0; i < 2000; ++i) {
        temp_ar.step(rng);
        hum_ar.step(rng);
        wind_ar.step(rng);
        cloud_ar.step(rng);
        load_ar.step(rng);
        z2_ar.step(rng);
        z3_ar.step(rng);
    }

    const Timestamp start = timeutil::make_timestamp(2017, 1, 1, 0, 0);
    for (int t = 0; t < n; ++t) {
        ingest::RawRecord r;
        r.timestamp = start + static_cast<Timestamp>(t) * 600;
        const double hour = static_cast<double>(t % 144) / 6.0;
        const double doy = static_cast<double>(t) / 144.0;
        const double dow_frac =
            static_cast<double>(timeutil::day_of_week(r.timestamp)) + hour / 24.0;

        const double t_season = 19.0 + 8.0 * std::cos(kTwoPi * (doy - 210.0) / 365.0);
        const double t_diurnal = 4.5 * std::cos(kTwoPi * (hour - 14.5) / 24.0);
        r.temperature = t_season + t_diurnal + temp_ar.step(rng);

        r.humidity = std::clamp(
            66.0 - 1.3 * (r.temperature - 19.0) + 10.0 * std::cos(kTwoPi * (hour - 4.0) / 24.0) +
                hum_ar.step(rng),
            15.0, 99.9);

        r.wind_speed = std::clamp(2.0 + 1.4 * wind_ar.step(rng), 0.05, 6.5);

        const double half_day = 5.5 + 1.6 * std::cos(kTwoPi * (doy - 172.0) / 365.0);
        const double rise = 12.75 - half_day, set = 12.75 + half_day;
        double sun = 0;
        if (hour > rise && hour < set)
            sun = std::sin(std::numbers::pi * (hour - rise) / (set - rise));
        const double cloud = std::clamp(0.75 + 0.5 * cloud_ar.step(rng), 0.15, 1.0);
        r.general_diffuse_flows =
            std::max(0.004, 480.0 * std::pow(sun, 1.3) * cloud + 2.0 * rng.uniform());
        r.diffuse_flows =
            std::max(0.003, 180.0 * sun * (1.1 - 0.6 * cloud) + 1.5 * rng.uniform());

        const double annual = p.annual_amp * std::cos(kTwoPi * (doy - 225.0) / 365.0);
        const double daily = p.daily_amp1 * std::cos(kTwoPi * (hour - 19.5) / 24.0) +
                             p.daily_amp2 * std::cos(2.0 * kTwoPi * (hour - 20.0) / 24.0);
        const double weekly = -p.weekly_amp * std::cos(kTwoPi * (dow_frac - 6.0) / 7.0);
        const double coupling = p.cooling_per_deg * std::max(r.temperature - 22.0, 0.0) +
                                p.heating_per_deg * std::max(14.0 - r.temperature, 0.0);
        const double level = p.base_load + annual + daily + weekly + coupling +
                             load_ar.step(rng) + p.white_sigma * rng.gaussian();
        r.zone1_power = std::clamp(level, 8000.0, 55000.0);
        r.zone2_power = std::clamp(0.66 * r.zone1_power + 1500.0 + z2_ar.step(rng), 5000.0, 45000.0);
        r.zone3_power = std::clamp(0.42 * r.zone1_power + 800.0 + z3_ar.step(rng), 3000.0, 30000.0);

        records.push_back(r);
    }
    return records;
}

void write_csv(const std::vector<ingest::RawRecord>& records, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "DateTime,Temperature,Humidity,Wind Speed,general diffuse flows,diffuse flows,"
          "Zone 1 Power Consumption,Zone 2  Power Consumption,Zone 3  Power Consumption\n";
    char line[320];
    for (const auto& r : records) {
        const auto c = timeutil::civil_from_timestamp(r.timestamp);
        std::snprintf(line, sizeof line,
                      "%u/%u/%d %u:%02u,%.6g,%.6g,%.6g,%.6g,%.6g,%.8g,%.8g,%.8g\n", c.month,
                      c.day, c.year, c.hour, c.minute, r.temperature, r.humidity, r.wind_speed,
                      r.general_diffuse_flows, r.diffuse_flows, r.zone1_power, r.zone2_power,
                      r.zone3_power);
        os << line;
    }
    if (!os) throw std::runtime_error("write failed for " + path);
}

}  // namespace qrc::synthdata
