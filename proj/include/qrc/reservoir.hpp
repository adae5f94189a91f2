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

#include <string>
#include <vector>

#include "qrc/common.hpp"
#include "qrc/ingest.hpp"
#include "qrc/qsim.hpp"
#include "qrc/reservoir_config.hpp"

namespace qrc::reservoir {

/// Regenerates the fixed reservoir parameters from config.seed: one
/// Haar-random ZYZ rotation per (layer, qubit) and the deterministic
/// per-layer encoding shifts phi_l = l*pi/(2L). Bit-exact across runs.
qsim::ReservoirParams generate_params(const ReservoirConfig& config);

/// Normalized exponential recency weights over a window of length T:
/// k(tau) proportional to exp(-lambda*(T-1-tau)), so the most recent step
/// carries the largest weight and the weights sum to 1.
std::vector<double> kernel_weights(int T, double decay);

/// Runs the per-step circuit over a T x 11 window and aggregates the
/// measurement vectors with every configured kernel. Output layout is
/// kernel-major: [decay 0 block of M, decay 1 block of M, ...]. The circuit
/// is re-prepared from |0...0> at every step; all temporal memory comes from
/// the kernels.
std::vector<double> extract_window(const ingest::WindowSample& window,
                                   const qsim::ReservoirParams& params,
                                   const ReservoirConfig& config, const ShotSetting& shot_setting,
                                   std::uint64_t window_seed);

enum class ExecutionMode { serial, parallel };

/// Feature matrix for a window set, one row per window. Row i uses an RNG
/// stream derived from (base_seed, i), so serial and parallel execution and
/// any processing order produce bit-identical results.
Matrix extract_features(const std::vector<ingest::WindowSample>& windows,
                        const qsim::ReservoirParams& params, const ReservoirConfig& config,
                        const ShotSetting& shot_setting, std::uint64_t base_seed,
                        ExecutionMode mode = ExecutionMode::parallel);

struct ExtractStats {
    bool cache_hit = false;
    std::string cache_path;
};

/// extract_features with a mandatory on-disk cache, keyed by (config hash,
/// shot setting, base seed, window-data hash). A warm cache returns
/// bit-identical features without running any circuits; a corrupted or
/// mismatched cache file is recomputed with a warning.
Matrix extract_dataset(const std::vector<ingest::WindowSample>& windows,
                       const qsim::ReservoirParams& params, const ReservoirConfig& config,
                       const ShotSetting& shot_setting, std::uint64_t base_seed,
                       const std::string& cache_dir, ExtractStats* stats = nullptr,
                       ExecutionMode mode = ExecutionMode::parallel);

}  // namespace qrc::reservoir
