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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qrc/config.hpp"
#include "qrc/gasearch.hpp"
#include "qrc/ingest.hpp"
#include "qrc/quantize.hpp"
#include "qrc/readout.hpp"
#include "qrc/reservoir.hpp"

namespace qrc::pipeline {

/// Everything one experiment needs, assembled from the config file plus CLI
/// overrides. The defaults reproduce the reference experimental grid: seeds
/// {0,1}, shot settings {none, 512}, bit widths {32,8,6,4,3,2}.
struct RunConfig {
    std::string data_path;
    std::string output_dir = "out";
    std::string cache_dir;  // defaults to <output_dir>/cache; QRC_CACHE_DIR wins
    std::vector<std::uint64_t> seeds = {0, 1};
    std::vector<ShotSetting> shot_settings = {ShotSetting::exact(), ShotSetting::with_shots(512)};
    std::vector<int> bit_widths = {32, 8, 6, 4, 3, 2};
    int window_length = ingest::kWindowLength;
    double train_ratio = 0.70, val_ratio = 0.10, test_ratio = 0.20;
    std::vector<double> alpha_grid = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
    std::vector<double> kernel_decays = {0.1, 0.4, 1.6};
    bool reservoir_from_search = true;
    ReservoirConfig reservoir;  // used when reservoir_from_search is false
    gasearch::GaParams ga;
    quantize::ClipGrid clip_grid;
    int refine_rounds = 5;
    reservoir::ExecutionMode mode = reservoir::ExecutionMode::parallel;
    int trace_rows = 500;

    static RunConfig from_kv(const KvConfig& kv);
    static RunConfig from_file(const std::string& path);

    /// Applies the QRC_CACHE_DIR override and the cache default.
    void finalize();

    std::uint64_t hash() const;
};

struct PreparedData {
    ingest::ScalerState scaler;
    ingest::ScaledFrame train, val, test;
    std::vector<ingest::WindowSample> train_windows, val_windows, test_windows;
    std::uint64_t data_hash = 0;
    std::size_t hourly_count = 0;
};

/// Runs the full preprocessing chain on a raw CSV in memory (no files).
PreparedData prepare_from_records(const std::vector<ingest::RawRecord>& records,
                                  const RunConfig& cfg);

struct PrepareSummary {
    std::size_t hourly_count = 0;
    std::size_t train_rows = 0, val_rows = 0, test_rows = 0;
    std::size_t train_windows = 0, val_windows = 0, test_windows = 0;
    bool cache_hit = false;
    std::string prepared_dir;
};

/// prepare: parse, resample, engineer, split, scale, window, persist.
/// Re-running over unchanged inputs is a no-op reported as a cache hit.
PrepareSummary cmd_prepare(const RunConfig& cfg);

PreparedData load_prepared(const std::string& output_dir);

struct SearchSummary {
    gasearch::EvaluatedGenome best;
    std::size_t evaluations = 0;
    std::string winner_path;
    std::string report_path;
};

/// search: GA over the prepared data; writes the JSON-lines report and the
/// winning reservoir config.
SearchSummary cmd_search(const RunConfig& cfg);

struct CellDiagnostics {
    std::uint64_t seed = 0;
    std::string shots_label;
    int bit_width = 32;
    readout::Metrics test_metrics;
    quantize::RefineInfo refine;
    double selected_alpha = 0;
    bool failed = false;
    std::string error;
};

struct RunResult {
    std::vector<quantize::QuantReportRow> rows;
    std::vector<CellDiagnostics> cells;
    std::map<std::string, double> fp32_rmse_by_shots;  // mean across seeds
    std::string results_csv, degradation_csv, trace_csv, manifest_path;
    bool any_failed = false;
};

/// run: the full grid. For every (seed, shot setting): extract features
/// (cached), select alpha on validation, fit the FP32 readout, quantize at
/// every bit width, evaluate on test; then aggregate across seeds and write
/// results.csv / degradation.csv / trace.csv plus the run manifest. Per-cell
/// failures are recorded and the rest of the grid still runs.
RunResult cmd_run(const RunConfig& cfg);

/// report: prints the results table, flags bit widths beyond the 5% and 15%
/// degradation thresholds, and names the best finite-shot configuration.
std::string cmd_report(const std::string& output_dir);

void save_reservoir_config(const ReservoirConfig& config, const std::string& path);
ReservoirConfig load_reservoir_config(const std::string& path);

}  // namespace qrc::pipeline
