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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qrc/qsim.hpp"
#include "qrc/reservoir.hpp"
#include "support/dense_oracle.hpp"

using namespace qrc;
using qsim::PauliObservable;
using qsim::StateVector;

namespace {

constexpr double kPi = std::numbers::pi;

ReservoirConfig small_config(int n_qubits, int n_layers, std::uint64_t seed) {
    ReservoirConfig c;
    c.n_qubits = n_qubits;
    c.n_layers = n_layers;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("chebyshev angle endpoints and identity") {
    CHECK(qsim::chebyshev_angle(1.0, 3, 0.0) == doctest::Approx(0.0));
    CHECK(qsim::chebyshev_angle(0.5, 2, 0.0) == doctest::Approx(kPi));
    // values outside [0,1] clamp inside the arccos
    CHECK(qsim::chebyshev_angle(1.7, 2, 0.25) == doctest::Approx(0.25));
    CHECK(qsim::chebyshev_angle(-0.3, 1, 0.0) == doctest::Approx(kPi));
}

TEST_CASE("chebyshev map reproduces the polynomial recurrence") {
    // cos(order * arccos(u)) must equal T_order(u) computed by the recurrence
    for (int order = 1; order <= 5; ++order) {
        for (double x : {0.0, 0.1, 0.25, 0.4, 0.5, 0.77, 0.9, 1.0}) {
            const double u = 2.0 * x - 1.0;
            double t_prev = 1.0, t_cur = u;
            for (int k = 2; k <= order; ++k) {
                const double t_next = 2.0 * u * t_cur - t_prev;
                t_prev = t_cur;
                t_cur = t_next;
            }
            const double expected = order == 0 ? 1.0 : t_cur;
            const double theta = qsim::chebyshev_angle(x, order, 0.0);
            CHECK(std::cos(theta) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("ry flips and preserves") {
    StateVector s(1);
    qsim::apply_ry(s, 0, kPi);
    CHECK(std::abs(s.amp(0)) == doctest::Approx(0.0));
    CHECK(s.amp(1).real() == doctest::Approx(1.0));

    StateVector t(2);
    qsim::apply_ry(t, 1, 0.0);
    CHECK(t.amp(0) == qsim::Amplitude{1.0, 0.0});  // bit-exact identity
}

TEST_CASE("gates preserve the norm") {
    Rng rng(99);
    StateVector s(3);
    for (int i = 0; i < 50; ++i) {
        const int q = static_cast<int>(rng.below(3));
        switch (rng.below(3)) {
            case 0: qsim::apply_ry(s, q, rng.uniform(0, 2 * kPi)); break;
            case 1: qsim::apply_rz(s, q, rng.uniform(0, 2 * kPi)); break;
            default:
                qsim::apply_unitary_zyz(s, q, rng.uniform(0, 2 * kPi), rng.uniform(0, kPi),
                                        rng.uniform(0, 2 * kPi));
        }
        CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("qubit index out of range throws") {
    StateVector s(2);
    CHECK_THROWS_AS(qsim::apply_ry(s, 2, 0.3), std::out_of_range);
    CHECK_THROWS_AS(qsim::apply_ry(s, -1, 0.3), std::out_of_range);
    CHECK_THROWS_AS(qsim::expectation(s, {PauliObservable::Kind::ZZ, 1}), std::out_of_range);
}

TEST_CASE("brickwork layer at g=0 is the identity") {
    StateVector s(3);
    qsim::apply_ry(s, 0, 0.7);
    qsim::apply_ry(s, 2, 1.3);
    const auto before = std::vector<qsim::Amplitude>(s.amplitudes().begin(),
                                                     s.amplitudes().end());
    qsim::apply_brickwork_layer(s, qsim::Parity::even, 0.0);
    qsim::apply_brickwork_layer(s, qsim::Parity::odd, 0.0);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(s.amp(i) == before[i]);
}

TEST_CASE("brickwork layer phases a basis state without moving weight") {
    StateVector s(3);  // |000>: all pairs agree -> phase exp(-i g) per pair
    qsim::apply_brickwork_layer(s, qsim::Parity::even, 0.4);
    CHECK(s.amp(0).real() == doctest::Approx(std::cos(0.4)));
    CHECK(s.amp(0).imag() == doctest::Approx(-std::sin(0.4)));
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
}

TEST_CASE("3-qubit even brickwork touches only the (0,1) pair") {
    // compare against the dense 8x8 coupling matrix
    Rng rng(5);
    StateVector s(3);
    for (int q = 0; q < 3; ++q) qsim::apply_ry(s, q, rng.uniform(0, kPi));
    oracle::CVec psi(s.amplitudes().begin(), s.amplitudes().end());

    qsim::apply_brickwork_layer(s, qsim::Parity::even, 0.9);
    psi = oracle::matvec(oracle::zz_pair(3, 0, 0.9), psi);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        CHECK(std::abs(psi[i] - s.amp(i)) < 1e-12);
    }
}

TEST_CASE("expectations on simple states") {
    StateVector zero(3);
    CHECK(qsim::expectation(zero, {PauliObservable::Kind::Z, 0}) == doctest::Approx(1.0));
    CHECK(qsim::expectation(zero, {PauliObservable::Kind::X, 1}) == doctest::Approx(0.0));
    CHECK(qsim::expectation(zero, {PauliObservable::Kind::Y, 2}) == doctest::Approx(0.0));
    CHECK(qsim::expectation(zero, {PauliObservable::Kind::ZZ, 1}) == doctest::Approx(1.0));

    StateVector plus(2);
    qsim::apply_ry(plus, 0, kPi / 2);  // (|0> + |1>)/sqrt(2) on qubit 0
    CHECK(qsim::expectation(plus, {PauliObservable::Kind::X, 0}) == doctest::Approx(1.0));
}

TEST_CASE("Bell state stabilizers are exact") {
    StateVector bell(2);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    bell.amp(0) = inv_sqrt2;
    bell.amp(3) = inv_sqrt2;
    CHECK(std::abs(qsim::expectation(bell, {PauliObservable::Kind::ZZ, 0}) - 1.0) < 1e-12);
    CHECK(std::abs(qsim::expectation(bell, {PauliObservable::Kind::XX, 0}) - 1.0) < 1e-12);
}

TEST_CASE("observable set ordering and size") {
    CHECK(qsim::observable_set(7).size() == 33);
    CHECK(qsim::observable_set(5).size() == 23);  // 3*5 + 2*4
    const auto obs = qsim::observable_set(3);
    REQUIRE(obs.size() == 13);
    CHECK(obs[0].kind == PauliObservable::Kind::Z);
    CHECK(obs[3].kind == PauliObservable::Kind::X);
    CHECK(obs[6].kind == PauliObservable::Kind::Y);
    CHECK(obs[9].kind == PauliObservable::Kind::ZZ);
    CHECK(obs[11].kind == PauliObservable::Kind::XX);
    CHECK(obs[12].qubit == 1);
}

TEST_CASE("empty circuit leaves the zero state") {
    const auto config = small_config(3, 0, 11);
    const auto params = reservoir::generate_params(config);
    const std::vector<double> x(11, 0.5);
    const auto state = qsim::run_reservoir_circuit(x, params, config);
    CHECK(state.amp(0).real() == doctest::Approx(1.0));
    for (std::size_t i = 1; i < state.dim(); ++i) CHECK(std::abs(state.amp(i)) == 0.0);
}

TEST_CASE("circuit is deterministic") {
    const auto config = small_config(3, 2, 17);
    const auto params = reservoir::generate_params(config);
    std::vector<double> x(11);
    Rng rng(3);
    for (auto& v : x) v = rng.uniform();
    const auto a = qsim::run_reservoir_circuit(x, params, config);
    const auto b = qsim::run_reservoir_circuit(x, params, config);
    for (std::size_t i = 0; i < a.dim(); ++i) CHECK(a.amp(i) == b.amp(i));
}

TEST_CASE("circuit rejects wrong feature count") {
    const auto config = small_config(2, 1, 4);
    const auto params = reservoir::generate_params(config);
    const std::vector<double> x(5, 0.5);
    CHECK_THROWS_AS(qsim::run_reservoir_circuit(x, params, config), std::invalid_argument);
}

TEST_CASE("N=2 single-layer circuit matches the dense composition") {
    const auto config = small_config(2, 1, 23);
    const auto params = reservoir::generate_params(config);
    std::vector<double> x(11);
    Rng rng(7);
    for (auto& v : x) v = rng.uniform();

    const auto state = qsim::run_reservoir_circuit(x, params, config, /*norm_check=*/true);
    const auto psi = oracle::run_circuit_dense(x, params, config);
    for (std::size_t i = 0; i < psi.size(); ++i) CHECK(std::abs(psi[i] - state.amp(i)) < 1e-12);
}

TEST_CASE("expectations match the dense oracle on random circuits up to N=3") {
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        ReservoirConfig config;
        config.n_qubits = 1 + static_cast<int>(rng.below(3));
        config.n_layers = static_cast<int>(rng.below(4));
        config.coupling_strength = rng.uniform(0.1, 1.5);
        config.encoding = rng.uniform() < 0.5 ? EncodingStrategy::cheb_stride1
                                              : EncodingStrategy::cheb_stride3;
        config.seed = rng.next_u64();
        const auto params = reservoir::generate_params(config);
        std::vector<double> x(11);
        for (auto& v : x) v = rng.uniform(-0.2, 1.2);

        const auto state = qsim::run_reservoir_circuit(x, params, config);
        const oracle::CVec psi = oracle::run_circuit_dense(x, params, config);
        for (const auto& obs : qsim::observable_set(config.n_qubits)) {
            const double expected = oracle::expectation_dense(psi, config.n_qubits, obs);
            CHECK(qsim::expectation(state, obs) == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("degenerate shot sampling is exact") {
    StateVector zero(2);
    Rng rng(1);
    CHECK(qsim::sample_expectation(zero, {PauliObservable::Kind::Z, 0}, 64, rng) == 1.0);
}

TEST_CASE("shot sampling is reproducible and lattice-valued") {
    StateVector s(1);
    qsim::apply_ry(s, 0, 1.1);
    Rng a(42), b(42);
    const double ea = qsim::sample_expectation(s, {PauliObservable::Kind::Z, 0}, 512, a);
    const double eb = qsim::sample_expectation(s, {PauliObservable::Kind::Z, 0}, 512, b);
    CHECK(ea == eb);
    // estimator lives on the lattice {-1, -1+2/s, ..., 1}
    const double steps = (ea + 1.0) * 256.0;
    CHECK(std::abs(steps - std::round(steps)) < 1e-12);
}

TEST_CASE("shot estimator is unbiased with binomial spread") {
    StateVector s(1);
    qsim::apply_ry(s, 0, kPi / 2);  // <Z> = 0
    const int shots = 512;
    const int trials = 20000;
    Rng rng(7);
    double sum = 0, sumsq = 0;
    for (int t = 0; t < trials; ++t) {
        const double e = qsim::sample_expectation(s, {PauliObservable::Kind::Z, 0}, shots, rng);
        sum += e;
        sumsq += e * e;
    }
    const double mean = sum / trials;
    const double std_emp = std::sqrt(sumsq / trials - mean * mean);
    const double std_theory = 1.0 / std::sqrt(shots);
    CHECK(std::abs(mean) < 3.0 * std_theory / std::sqrt(trials));
    CHECK(std_emp == doctest::Approx(std_theory).epsilon(0.05));
}

TEST_CASE("shot estimator is unbiased across random states") {
    Rng state_rng(31337);
    const int shots = 512;
    const int trials = 100000;
    for (int t = 0; t < 10; ++t) {
        StateVector s(2);
        qsim::apply_ry(s, 0, state_rng.uniform(0, 2 * kPi));
        qsim::apply_ry(s, 1, state_rng.uniform(0, 2 * kPi));
        qsim::apply_unitary_zyz(s, 0, state_rng.uniform(0, 2 * kPi),
                                state_rng.uniform(0, kPi), state_rng.uniform(0, 2 * kPi));
        const PauliObservable obs{PauliObservable::Kind::X, 1};
        const double exact = qsim::expectation(s, obs);

        Rng rng(derive_seed({4242, static_cast<std::uint64_t>(t)}));
        double sum = 0;
        for (int i = 0; i < trials; ++i) sum += qsim::sample_expectation(s, obs, shots, rng);
        const double mean = sum / trials;
        const double se = std::sqrt((1.0 - exact * exact) / shots) / std::sqrt(trials);
        CHECK(std::abs(mean - exact) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("measure_observable_set on the zero state") {
    StateVector zero(3);
    const auto v = qsim::measure_observable_set(zero, ShotSetting::exact(), 0);
    REQUIRE(v.size() == 13);
    for (int q = 0; q < 3; ++q) CHECK(v[static_cast<std::size_t>(q)] == doctest::Approx(1.0));
    for (int i = 3; i < 9; ++i) CHECK(v[static_cast<std::size_t>(i)] == doctest::Approx(0.0));
    CHECK(v[9] == doctest::Approx(1.0));   // ZZ
    CHECK(v[10] == doctest::Approx(1.0));  // ZZ
    CHECK(v[11] == doctest::Approx(0.0));  // XX
}

TEST_CASE("measure_observable_set shot values are order-independent") {
    StateVector s(2);
    qsim::apply_ry(s, 0, 0.9);
    qsim::apply_ry(s, 1, 2.0);
    const auto a = qsim::measure_observable_set(s, ShotSetting::with_shots(128), 77);
    const auto b = qsim::measure_observable_set(s, ShotSetting::with_shots(128), 77);
    CHECK(a == b);
}
