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

#include "qrc/reservoir.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qrc/columnar.hpp"
#include "qrc/hash.hpp"

namespace qrc {

std::string encoding_name(EncodingStrategy e) {
    return e == EncodingStrategy::cheb_stride1 ? "cheb_stride1" : "cheb_stride3";
}

std::optional<EncodingStrategy> encoding_from_name(const std::string& name) {
    if (name == "cheb_stride1") return EncodingStrategy::cheb_stride1;
    if (name == "cheb_stride3") return EncodingStrategy::cheb_stride3;
    return std::nullopt;
}

void ReservoirConfig::validate() const {
    if (n_qubits < 1 || n_qubits > 12)
        throw std::invalid_argument("reservoir config: n_qubits out of range");
    if (n_layers < 0) throw std::invalid_argument("reservoir config: n_layers negative");
    if (!(coupling_strength > 0))
        throw std::invalid_argument("reservoir config: coupling strength must be > 0");
    if (l1_ratio < 0 || l1_ratio > 1)
        throw std::invalid_argument("reservoir config: l1_ratio must lie in [0,1]");
    if (kernel_decays.empty())
        throw std::invalid_argument("reservoir config: need at least one kernel decay");
    for (double d : kernel_decays)
        if (!(d > 0)) throw std::invalid_argument("reservoir config: kernel decays must be > 0");
}

std::uint64_t ReservoirConfig::hash() const {
    Hasher h;
    h.update_u64(static_cast<std::uint64_t>(n_qubits));
    h.update_u64(static_cast<std::uint64_t>(n_layers));
    h.update_u64(static_cast<std::uint64_t>(encoding));
    h.update_double(coupling_strength);
    h.update_double(l1_ratio);
    h.update_u64(kernel_decays.size());
    h.update_doubles(kernel_decays);
    h.update_u64(seed);
    return h.digest();
}

std::optional<ShotSetting> shot_setting_from_label(const std::string& label) {
    if (label == "none" || label == "None" || label == "exact") return ShotSetting::exact();
    try {
        const int s = std::stoi(label);
        if (s >= 1) return ShotSetting::with_shots(s);
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

namespace reservoir {

qsim::ReservoirParams generate_params(const ReservoirConfig& config) {
    config.validate();
    qsim::ReservoirParams params;
    params.seed = config.seed;
    params.n_qubits = config.n_qubits;
    params.n_layers = config.n_layers;

    constexpr double two_pi = 2.0 * std::numbers::pi;
    params.layer_shifts.resize(static_cast<std::size_t>(config.n_layers));
    for (int l = 1; l <= config.n_layers; ++l)
        params.layer_shifts[static_cast<std::size_t>(l - 1)] =
            l * std::numbers::pi / (2.0 * config.n_layers);

    // Haar measure on single-qubit rotations (up to global phase): uniform
    // alpha and gamma, cos(beta) uniform on [-1, 1].
    Rng rng(derive_seed({config.seed, 0x48414152 /*"HAAR"*/}));
    params.rotations.resize(static_cast<std::size_t>(config.n_layers) *
                            static_cast<std::size_t>(config.n_qubits));
    for (auto& rot : params.rotations) {
        rot.alpha = rng.uniform(0.0, two_pi);
        rot.beta = std::acos(1.0 - 2.0 * rng.uniform());
        rot.gamma = rng.uniform(0.0, two_pi);
    }
    return params;
}

std::vector<double> kernel_weights(int T, double decay) {
    if (T < 1) throw std::invalid_argument("kernel_weights: T must be >= 1");
    if (!(decay > 0)) throw std::invalid_argument("kernel_weights: decay must be > 0");
    std::vector<double> w(static_cast<std::size_t>(T));
    double sum = 0;
    for (int tau = 0; tau < T; ++tau) {
        w[static_cast<std::size_t>(tau)] = std::exp(-decay * static_cast<double>(T - 1 - tau));
        sum += w[static_cast<std::size_t>(tau)];
    }
    for (auto& x : w) x /= sum;
    return w;
}

std::vector<double> extract_window(const ingest::WindowSample& window,
                                   const qsim::ReservoirParams& params,
                                   const ReservoirConfig& config, const ShotSetting& shot_setting,
                                   std::uint64_t window_seed) {
    const auto T = static_cast<int>(window.inputs.rows);
    if (window.inputs.cols != ingest::kNumFeatures)
        throw std::invalid_argument("extract_window: window must have 11 feature columns");

    const int M = config.num_observables();
    const std::size_t D = config.kernel_decays.size();
    std::vector<std::vector<double>> kernels(D);
    for (std::size_t d = 0; d < D; ++d) kernels[d] = kernel_weights(T, config.kernel_decays[d]);

    std::vector<double> r(D * static_cast<std::size_t>(M), 0.0);
    for (int tau = 0; tau < T; ++tau) {
        const qsim::StateVector state = qsim::run_reservoir_circuit(
            std::span<const double>(window.inputs.row(static_cast<std::size_t>(tau)),
                                    ingest::kNumFeatures),
            params, config);
        const std::uint64_t step_seed =
            derive_seed({window_seed, static_cast<std::uint64_t>(tau)});
        const auto f = qsim::measure_observable_set(state, shot_setting, step_seed);
        for (std::size_t d = 0; d < D; ++d) {
            const double k = kernels[d][static_cast<std::size_t>(tau)];
            double* block = r.data() + d * static_cast<std::size_t>(M);
            for (int m = 0; m < M; ++m) block[m] += k * f[static_cast<std::size_t>(m)];
        }
    }
    return r;
}

Matrix extract_features(const std::vector<ingest::WindowSample>& windows,
                        const qsim::ReservoirParams& params, const ReservoirConfig& config,
                        const ShotSetting& shot_setting, std::uint64_t base_seed,
                        ExecutionMode mode) {
    const auto n = windows.size();
    const auto dim = static_cast<std::size_t>(config.feature_dim());
    Matrix R(n, dim);

    const auto run_row = [&](std::size_t i) {
        const std::uint64_t window_seed = derive_seed({base_seed, i});
        const auto r = extract_window(windows[i], params, config, shot_setting, window_seed);
        std::copy(r.begin(), r.end(), R.row(i));
    };

#ifdef _OPENMP
    if (mode == ExecutionMode::parallel) {
        const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 8)
        for (std::int64_t i = 0; i < count; ++i) run_row(static_cast<std::size_t>(i));
        return R;
    }
#else
    (void)mode;
#endif
    for (std::size_t i = 0; i < n; ++i) run_row(i);
    return R;
}

namespace {

std::string cache_key(const ReservoirConfig& config, const ShotSetting& shot_setting,
                      std::uint64_t base_seed, std::uint64_t data_hash) {
    Hasher h;
    h.update_u64(config.hash());
    h.update(shot_setting.label());
    h.update_u64(base_seed);
    h.update_u64(data_hash);
    return h.hex();
}

}  // namespace

Matrix extract_dataset(const std::vector<ingest::WindowSample>& windows,
                       const qsim::ReservoirParams& params, const ReservoirConfig& config,
                       const ShotSetting& shot_setting, std::uint64_t base_seed,
                       const std::string& cache_dir, ExtractStats* stats, ExecutionMode mode) {
    const std::uint64_t data_hash = ingest::hash_windows(windows);
    const std::string key = cache_key(config, shot_setting, base_seed, data_hash);
    std::filesystem::create_directories(cache_dir);
    const std::string path = cache_dir + "/features_" + key + ".qrccol";
    if (stats) {
        stats->cache_hit = false;
        stats->cache_path = path;
    }

    const auto dim = static_cast<std::size_t>(config.feature_dim());
    if (std::filesystem::exists(path)) {
        try {
            ColumnarFile f = ColumnarFile::load(path);
            if (f.meta.at("cache_key") != key || f.columns.size() != dim ||
                f.rows() != windows.size())
                throw std::runtime_error("cache key/shape mismatch");
            Matrix R(windows.size(), dim);
            for (std::size_t j = 0; j < dim; ++j)
                for (std::size_t i = 0; i < windows.size(); ++i) R(i, j) = f.columns[j][i];
            if (stats) stats->cache_hit = true;
            return R;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: feature cache %s unusable (%s); recomputing\n",
                         path.c_str(), e.what());
        }
    }

    Matrix R = extract_features(windows, params, config, shot_setting, base_seed, mode);

    ColumnarFile f;
    f.meta["cache_key"] = key;
    f.meta["config_hash"] = std::to_string(config.hash());
    f.meta["shot_setting"] = shot_setting.label();
    f.meta["base_seed"] = std::to_string(base_seed);
    f.meta["data_hash"] = std::to_string(data_hash);
    f.column_names.reserve(dim);
    f.columns.assign(dim, std::vector<double>(windows.size()));
    const int M = config.num_observables();
    for (std::size_t j = 0; j < dim; ++j) {
        f.column_names.push_back("r_d" + std::to_string(j / static_cast<std::size_t>(M)) + "_m" +
                                 std::to_string(j % static_cast<std::size_t>(M)));
        for (std::size_t i = 0; i < windows.size(); ++i) f.columns[j][i] = R(i, j);
    }
    f.save(path);
    return R;
}

}  // namespace reservoir
}  // namespace qrc
