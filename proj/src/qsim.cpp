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

#include "qrc/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qrc::qsim {

namespace {

void check_qubit(const StateVector& state, int qubit) {
    if (qubit < 0 || qubit >= state.num_qubits())
        throw std::out_of_range("qubit index " + std::to_string(qubit) + " out of range for N=" +
                                std::to_string(state.num_qubits()));
}

void check_norm(const StateVector& state) {
    if (std::abs(state.norm() - 1.0) > 1e-10)
        throw std::logic_error("statevector norm drifted beyond 1e-10");
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 20)
        throw std::invalid_argument("qubit count must be in [1, 20], got " +
                                    std::to_string(n_qubits));
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

double StateVector::norm() const {
    double s = 0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::reset_to_zero_state() {
    std::fill(amps_.begin(), amps_.end(), Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

void apply_ry(StateVector& state, int qubit, double theta) {
    check_qubit(state, qubit);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const std::size_t mask = std::size_t{1} << qubit;
    const std::size_t dim = state.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & mask) continue;
        const Amplitude a0 = state.amp(i);
        const Amplitude a1 = state.amp(i | mask);
        state.amp(i) = c * a0 - s * a1;
        state.amp(i | mask) = s * a0 + c * a1;
    }
}

void apply_rz(StateVector& state, int qubit, double theta) {
    check_qubit(state, qubit);
    const Amplitude p0 = std::polar(1.0, -0.5 * theta);
    const Amplitude p1 = std::polar(1.0, 0.5 * theta);
    const std::size_t mask = std::size_t{1} << qubit;
    const std::size_t dim = state.dim();
    for (std::size_t i = 0; i < dim; ++i) state.amp(i) *= (i & mask) ? p1 : p0;
}

void apply_unitary_zyz(StateVector& state, int qubit, double alpha, double beta, double gamma) {
    check_qubit(state, qubit);
    const double cb = std::cos(0.5 * beta);
    const double sb = std::sin(0.5 * beta);
    const Amplitude u00 = std::polar(cb, -0.5 * (alpha + gamma));
    const Amplitude u01 = -std::polar(sb, -0.5 * (alpha - gamma));
    const Amplitude u10 = std::polar(sb, 0.5 * (alpha - gamma));
    const Amplitude u11 = std::polar(cb, 0.5 * (alpha + gamma));
    const std::size_t mask = std::size_t{1} << qubit;
    const std::size_t dim = state.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & mask) continue;
        const Amplitude a0 = state.amp(i);
        const Amplitude a1 = state.amp(i | mask);
        state.amp(i) = u00 * a0 + u01 * a1;
        state.amp(i | mask) = u10 * a0 + u11 * a1;
    }
}

void apply_brickwork_layer(StateVector& state, Parity parity, double coupling_strength) {
    const int n = state.num_qubits();
    // exp(-i g Z(x)Z) is diagonal: phase exp(-i g) when the two bits agree,
    // exp(+i g) when they differ.
    const Amplitude phase_same = std::polar(1.0, -coupling_strength);
    const Amplitude phase_diff = std::polar(1.0, coupling_strength);
    const std::size_t dim = state.dim();
    for (int q = (parity == Parity::even) ? 0 : 1; q + 1 < n; q += 2) {
        const std::size_t bit_lo = std::size_t{1} << q;
        const std::size_t bit_hi = std::size_t{1} << (q + 1);
        for (std::size_t i = 0; i < dim; ++i) {
            const bool same = static_cast<bool>(i & bit_lo) == static_cast<bool>(i & bit_hi);
            state.amp(i) *= same ? phase_same : phase_diff;
        }
    }
}

double chebyshev_angle(double x, int order, double shift) {
    const double u = std::clamp(2.0 * x - 1.0, -1.0, 1.0);
    return static_cast<double>(order) * std::acos(u) + shift;
}

StateVector run_reservoir_circuit(std::span<const double> features, const ReservoirParams& params,
                                  const ReservoirConfig& config, bool norm_check) {
    if (features.size() != 11)
        throw std::invalid_argument("run_reservoir_circuit: expected 11 features, got " +
                                    std::to_string(features.size()));
    if (params.n_qubits != config.n_qubits || params.n_layers != config.n_layers)
        throw std::invalid_argument("run_reservoir_circuit: params/config shape mismatch");

    StateVector state(config.n_qubits);
    const int stride = static_cast<int>(config.encoding);
    for (int layer = 1; layer <= config.n_layers; ++layer) {
        const double shift = params.layer_shifts[static_cast<std::size_t>(layer - 1)];
        for (int q = 0; q < config.n_qubits; ++q) {
            const double x = features[static_cast<std::size_t>((q + layer * stride) % 11)];
            apply_ry(state, q, chebyshev_angle(x, layer, shift));
            if (norm_check) check_norm(state);
        }
        for (int q = 0; q < config.n_qubits; ++q) {
            const auto& r = params.rotation(layer - 1, q);
            apply_unitary_zyz(state, q, r.alpha, r.beta, r.gamma);
            if (norm_check) check_norm(state);
        }
        if (config.n_qubits >= 2) {
            apply_brickwork_layer(state, Parity::even, config.coupling_strength);
            if (norm_check) check_norm(state);
            apply_brickwork_layer(state, Parity::odd, config.coupling_strength);
            if (norm_check) check_norm(state);
        }
    }
    return state;
}

std::vector<PauliObservable> observable_set(int n_qubits) {
    std::vector<PauliObservable> obs;
    obs.reserve(static_cast<std::size_t>(3 * n_qubits + 2 * (n_qubits - 1)));
    for (int q = 0; q < n_qubits; ++q) obs.push_back({PauliObservable::Kind::Z, q});
    for (int q = 0; q < n_qubits; ++q) obs.push_back({PauliObservable::Kind::X, q});
    for (int q = 0; q < n_qubits; ++q) obs.push_back({PauliObservable::Kind::Y, q});
    for (int q = 0; q + 1 < n_qubits; ++q) obs.push_back({PauliObservable::Kind::ZZ, q});
    for (int q = 0; q + 1 < n_qubits; ++q) obs.push_back({PauliObservable::Kind::XX, q});
    return obs;
}

double expectation(const StateVector& state, const PauliObservable& obs) {
    const int n = state.num_qubits();
    const bool pair = obs.kind == PauliObservable::Kind::ZZ || obs.kind == PauliObservable::Kind::XX;
    if (obs.qubit < 0 || obs.qubit + (pair ? 1 : 0) >= n)
        throw std::out_of_range("observable qubit index out of range");

    // Pauli-string action as bit masks: (P|psi>)_i = c_i * a_{i ^ flip} with
    // c_i = (-i)^{#Y} * (-1)^{popcount(i & z_mask)}.
    std::size_t flip = 0, z_mask = 0;
    int y_count = 0;
    const std::size_t lo = std::size_t{1} << obs.qubit;
    const std::size_t hi = lo << 1;
    switch (obs.kind) {
        case PauliObservable::Kind::Z: z_mask = lo; break;
        case PauliObservable::Kind::X: flip = lo; break;
        case PauliObservable::Kind::Y: flip = lo; z_mask = lo; y_count = 1; break;
        case PauliObservable::Kind::ZZ: z_mask = lo | hi; break;
        case PauliObservable::Kind::XX: flip = lo | hi; break;
    }
    const Amplitude y_factor = (y_count == 0) ? Amplitude{1.0, 0.0} : Amplitude{0.0, -1.0};

    Amplitude acc{0.0, 0.0};
    const std::size_t dim = state.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        const double sign = (std::popcount(i & z_mask) & 1) ? -1.0 : 1.0;
        acc += std::conj(state.amp(i)) * sign * state.amp(i ^ flip);
    }
    acc *= y_factor;
    if (std::abs(acc.imag()) >= 1e-10)
        throw std::logic_error("expectation of a Hermitian observable came out complex");
    return acc.real();
}

double sample_expectation(const StateVector& state, const PauliObservable& obs, int shots,
                          Rng& rng) {
    if (shots < 1) throw std::invalid_argument("sample_expectation: shots must be >= 1");
    const double exact = expectation(state, obs);
    const double p_plus = std::clamp(0.5 * (1.0 + exact), 0.0, 1.0);
    int n_plus = 0;
    for (int s = 0; s < shots; ++s)
        if (rng.uniform() < p_plus) ++n_plus;
    return static_cast<double>(2 * n_plus - shots) / static_cast<double>(shots);
}

std::vector<double> measure_observable_set(const StateVector& state,
                                           const ShotSetting& shot_setting,
                                           std::uint64_t step_seed) {
    const auto obs = observable_set(state.num_qubits());
    std::vector<double> values(obs.size());
    for (std::size_t m = 0; m < obs.size(); ++m) {
        if (shot_setting.is_exact()) {
            values[m] = expectation(state, obs[m]);
        } else {
            Rng rng(derive_seed({step_seed, m}));
            values[m] = sample_expectation(state, obs[m], *shot_setting.shots, rng);
        }
    }
    return values;
}

}  // namespace qrc::qsim
