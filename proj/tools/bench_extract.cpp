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

// Compares the serial reference extraction against the OpenMP-parallel path
// on a synthetic window batch and checks the two produce identical bits.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qrc/reservoir.hpp"
#include "qrc/rng.hpp"

namespace {

std::vector<qrc::ingest::WindowSample> synthetic_windows(std::size_t count, int T,
                                                         std::uint64_t seed) {
    qrc::Rng rng(seed);
    std::vector<qrc::ingest::WindowSample> windows(count);
    for (auto& w : windows) {
        w.inputs = qrc::Matrix(static_cast<std::size_t>(T), qrc::ingest::kNumFeatures);
        for (double& v : w.inputs.data) v = rng.uniform();
        w.target_scaled = rng.uniform();
        w.target_raw = w.target_scaled * 1000.0;
    }
    return windows;
}

double run_timed(const std::vector<qrc::ingest::WindowSample>& windows,
                 const qrc::qsim::ReservoirParams& params, const qrc::ReservoirConfig& config,
                 const qrc::ShotSetting& shots, qrc::reservoir::ExecutionMode mode,
                 qrc::Matrix& out) {
    const auto t0 = std::chrono::steady_clock::now();
    out = qrc::reservoir::extract_features(windows, params, config, shots, 42, mode);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n_windows = 256;
    int shots = 0;  // 0 = exact
    for (int i = 1; i + 1 < argc; i += 2) {
        if (std::strcmp(argv[i], "--windows") == 0) n_windows = std::stoull(argv[i + 1]);
        else if (std::strcmp(argv[i], "--shots") == 0) shots = std::stoi(argv[i + 1]);
    }

    qrc::ReservoirConfig config;  // reference architecture: N=7, L=4
    config.seed = 7;
    const auto params = qrc::reservoir::generate_params(config);
    const auto shot_setting =
        shots > 0 ? qrc::ShotSetting::with_shots(shots) : qrc::ShotSetting::exact();
    const auto windows = synthetic_windows(n_windows, qrc::ingest::kWindowLength, 1234);

#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("extracting %zu windows (T=%d, N=%d, L=%d, shots=%s), %d thread(s)\n", n_windows,
                qrc::ingest::kWindowLength, config.n_qubits, config.n_layers,
                shot_setting.label().c_str(), threads);

    qrc::Matrix serial, parallel;
    const double t_serial = run_timed(windows, params, config, shot_setting,
                                      qrc::reservoir::ExecutionMode::serial, serial);
    const double t_parallel = run_timed(windows, params, config, shot_setting,
                                        qrc::reservoir::ExecutionMode::parallel, parallel);

    const bool identical = serial.data == parallel.data;
    std::printf("serial:   %8.3f s  (%7.1f windows/s)\n", t_serial,
                static_cast<double>(n_windows) / t_serial);
    std::printf("parallel: %8.3f s  (%7.1f windows/s)\n", t_parallel,
                static_cast<double>(n_windows) / t_parallel);
    std::printf("speedup:  %.2fx\n", t_serial / t_parallel);
    std::printf("bit-identical results: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
