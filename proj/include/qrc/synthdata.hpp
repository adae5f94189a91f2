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

#include <cstdint>
#include <string>
#include <vector>

#include "qrc/ingest.hpp"

namespace qrc::synthdata {

/// Knobs for the synthetic stand-in dataset. The defaults produce a year of
/// 10-minute records (52,416 rows, 364 days of 2017) whose schema, units and
/// signal structure mirror the Tetouan Zone 1 consumption data: summer-peaked
/// seasonality, a two-harmonic daily cycle with an evening peak, a weekend
/// dip, temperature coupling, and autocorrelated noise calibrated so an
/// hourly one-step forecaster lands at a few-thousand-kWh RMSE.
struct SynthParams {
    std::uint64_t seed = 20170101;
    int days = 364;
    double base_load = 30000.0;
    double annual_amp = 3200.0;
    double daily_amp1 = 5200.0;
    double daily_amp2 = 1700.0;
    double weekly_amp = 900.0;
    double cooling_per_deg = 230.0;
    double heating_per_deg = 90.0;
    double noise_phi = 0.983;   // AR(1) coefficient at 10-minute cadence
    double noise_sigma = 540.0; // AR(1) innovation std
    double white_sigma = 240.0; // uncorrelated per-record noise
};

std::vector<ingest::RawRecord> generate_records(const SynthParams& params = {});

/// Writes records in the upstream CSV schema, including its quirks (M/D/YYYY
/// timestamps, doubled spaces in the Zone 2/3 headers).
void write_csv(const std::vector<ingest::RawRecord>& records, const std::string& path);

}  // namespace qrc::synthdata
