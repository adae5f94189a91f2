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
#include <optional>
#include <string>
#include <vector>

namespace qrc {

/// How window features map onto encoding rotations: the cyclic
/// feature-to-qubit assignment stride. Feature index for qubit q in layer l
/// is (q + l*stride) mod 11.
enum class EncodingStrategy : int { cheb_stride1 = 1, cheb_stride3 = 3 };

std::string encoding_name(EncodingStrategy e);
std::optional<EncodingStrategy> encoding_from_name(const std::string& name);

/// The architecture genome plus the seed that deterministically generates the
/// fixed reservoir parameters. Immutable once built into ReservoirParams.
struct ReservoirConfig {
    int n_qubits = 7;
    int n_layers = 4;
    EncodingStrategy encoding = EncodingStrategy::cheb_stride1;
    double coupling_strength = 0.8;
    // heavier l1 prunes to near-uniform surviving weights, which the
    // symmetric per-tensor quantizer handles gracefully
    double l1_ratio = 0.9;
    std::vector<double> kernel_decays = {0.1, 0.4, 1.6};
    std::uint64_t seed = 0;

    /// Observables per step: Z, X, Y per qubit plus ZZ and XX per adjacent pair.
    int num_observables() const { return 3 * n_qubits + 2 * (n_qubits - 1); }

    /// Final feature vector length: one observable block per kernel decay.
    int feature_dim() const {
        return num_observables() * static_cast<int>(kernel_decays.size());
    }

    /// Sanity checks independent of the search space (the GA additionally
    /// restricts genes to its own domains).
    void validate() const;

    std::uint64_t hash() const;
};

/// Measurement mode: exact expectations, or binomial estimates from s shots.
struct ShotSetting {
    std::optional<int> shots;  // empty = exact

    static ShotSetting exact() { return {}; }
    static ShotSetting with_shots(int s) { return {s}; }

    bool is_exact() const { return !shots.has_value(); }
    std::string label() const { return shots ? std::to_string(*shots) : "none"; }
};

std::optional<ShotSetting> shot_setting_from_label(const std::string& label);

}  // namespace qrc
