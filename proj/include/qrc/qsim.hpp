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

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qrc/reservoir_config.hpp"
#include "qrc/rng.hpp"

namespace qrc::qsim {

using Amplitude = std::complex<double>;

/// Dense statevector with little-endian qubit indexing: qubit 0 is the least
/// significant bit of the amplitude index. Starts in |0...0>.
class StateVector {
  public:
    explicit StateVector(int n_qubits);

    int num_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    Amplitude& amp(std::size_t i) { return amps_[i]; }
    const Amplitude& amp(std::size_t i) const { return amps_[i]; }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    std::span<Amplitude> amplitudes() { return amps_; }

    /// L2 norm; 1 within 1e-10 after any sequence of gates.
    double norm() const;

    void reset_to_zero_state();

  private:
    int n_qubits_;
    std::vector<Amplitude> amps_;
};

/// RY(theta) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]].
void apply_ry(StateVector& state, int qubit, double theta);

/// RZ(theta) = diag(exp(-i t/2), exp(+i t/2)).
void apply_rz(StateVector& state, int qubit, double theta);

/// ZYZ Euler rotation RZ(alpha) RY(beta) RZ(gamma), applied right to left.
void apply_unitary_zyz(StateVector& state, int qubit, double alpha, double beta, double gamma);

enum class Parity { even, odd };

/// Applies exp(-i g Z(x)Z) to every adjacent pair (q, q+1) with q of the given
/// parity. Open boundary, no wraparound; the couplings within one parity are
/// diagonal and commute, so order is irrelevant.
void apply_brickwork_layer(StateVector& state, Parity parity, double coupling_strength);

/// Chebyshev feature encoding: theta = order * arccos(clamp(2x-1, -1, 1)) + shift,
/// so that cos(theta - shift) = T_order(2x-1). Inputs outside [0,1] (possible
/// on val/test after train-fit scaling) are clamped inside the arccos only.
double chebyshev_angle(double x, int order, double shift);

/// Fixed per-site Haar rotations (ZYZ angles) and per-layer encoding shifts,
/// all regenerated bit-exactly from the seed.
struct ReservoirParams {
    struct Zyz {
        double alpha, beta, gamma;
    };
    std::vector<Zyz> rotations;       // n_layers * n_qubits, layer-major
    std::vector<double> layer_shifts; // length n_layers
    std::uint64_t seed = 0;
    int n_qubits = 0;
    int n_layers = 0;

    const Zyz& rotation(int layer, int qubit) const {
        return rotations[static_cast<std::size_t>(layer) * static_cast<std::size_t>(n_qubits) +
                         static_cast<std::size_t>(qubit)];
    }
};

/// Runs the full reservoir circuit on a fresh |0...0> state for one time step.
/// Per layer l = 1..L: Chebyshev RY encoding of every qubit (order l, shift
/// phi_l, feature (q + l*stride) mod 11), the fixed Haar rotation per qubit,
/// then even and odd brickwork coupling layers. With norm_check set the norm
/// is verified to 1e-10 after every gate.
StateVector run_reservoir_circuit(std::span<const double> features, const ReservoirParams& params,
                                  const ReservoirConfig& config, bool norm_check = false);

struct PauliObservable {
    enum class Kind { Z, X, Y, ZZ, XX };
    Kind kind;
    int qubit;  // single-qubit index, or the lower index of the adjacent pair
};

/// The measurement set in fixed order:
/// [Z_0..Z_{N-1}, X_0..X_{N-1}, Y_0..Y_{N-1}, ZZ_{0,1}..ZZ_{N-2,N-1}, XX_{0,1}..].
std::vector<PauliObservable> observable_set(int n_qubits);

/// Exact <psi|P|psi>. The accumulated imaginary part must be < 1e-10 (the
/// observables are Hermitian) and is discarded after that check.
double expectation(const StateVector& state, const PauliObservable& obs);

/// Finite-shot estimate: s independent +-1 eigenvalue draws with
/// P(+1) = (1 + <P>)/2, returning (n+ - n-)/s.
double sample_expectation(const StateVector& state, const PauliObservable& obs, int shots,
                          Rng& rng);

/// Per-step measurement vector of length 3N + 2(N-1), exact or sampled. In
/// shot mode each observable gets its own RNG stream derived from
/// (step_seed, observable index), so values do not depend on evaluation order.
std::vector<double> measure_observable_set(const StateVector& state,
                                           const ShotSetting& shot_setting,
                                           std::uint64_t step_seed);

}  // namespace qrc::qsim
