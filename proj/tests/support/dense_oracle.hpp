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

// Dense-matrix oracle for small qubit counts. Everything here is rebuilt from
// first principles (Kronecker products, explicit 2x2 / 4x4 matrices) so it
// shares no code path with the statevector simulator it checks.

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "qrc/qsim.hpp"

namespace oracle {

using C = std::complex<double>;
using CMat = std::vector<std::vector<C>>;
using CVec = std::vector<C>;

inline CMat identity(std::size_t n) {
    CMat m(n, CVec(n, C{0, 0}));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline CMat kron(const CMat& a, const CMat& b) {
    const std::size_t ra = a.size(), ca = a[0].size(), rb = b.size(), cb = b[0].size();
    CMat m(ra * rb, CVec(ca * cb, C{0, 0}));
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < ca; ++j)
            for (std::size_t k = 0; k < rb; ++k)
                for (std::size_t l = 0; l < cb; ++l) m[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
    return m;
}

inline CVec matvec(const CMat& m, const CVec& v) {
    CVec out(m.size(), C{0, 0});
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

inline CMat ry_mat(double t) {
    return {{C{std::cos(t / 2), 0}, C{-std::sin(t / 2), 0}},
            {C{std::sin(t / 2), 0}, C{std::cos(t / 2), 0}}};
}

inline CMat rz_mat(double t) {
    return {{std::polar(1.0, -t / 2), C{0, 0}}, {C{0, 0}, std::polar(1.0, t / 2)}};
}

inline CMat matmul(const CMat& a, const CMat& b) {
    CMat m(a.size(), CVec(b[0].size(), C{0, 0}));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b[0].size(); ++j) m[i][j] += a[i][k] * b[k][j];
    return m;
}

inline CMat zyz_mat(double alpha, double beta, double gamma) {
    return matmul(rz_mat(alpha), matmul(ry_mat(beta), rz_mat(gamma)));
}

inline CMat pauli_z() { return {{C{1, 0}, C{0, 0}}, {C{0, 0}, C{-1, 0}}}; }
inline CMat pauli_x() { return {{C{0, 0}, C{1, 0}}, {C{1, 0}, C{0, 0}}}; }
inline CMat pauli_y() { return {{C{0, 0}, C{0, -1}}, {C{0, 1}, C{0, 0}}}; }

/// Little-endian embedding: qubit 0 is the least significant index bit, so a
/// gate on qubit q sits at kron(I_high, U, I_low).
inline CMat embed_single(int n_qubits, int q, const CMat& u) {
    CMat m = identity(std::size_t{1} << (n_qubits - 1 - q));
    m = kron(m, u);
    return kron(m, identity(std::size_t{1} << q));
}

/// exp(-i g Z(x)Z) on the adjacent pair (q, q+1).
inline CMat zz_pair(int n_qubits, int q, double g) {
    const C same = std::polar(1.0, -g), diff = std::polar(1.0, g);
    CMat d4 = identity(4);
    d4[0][0] = same;
    d4[1][1] = diff;
    d4[2][2] = diff;
    d4[3][3] = same;
    CMat m = identity(std::size_t{1} << (n_qubits - 2 - q));
    m = kron(m, d4);
    return kron(m, identity(std::size_t{1} << q));
}

/// Re-derives the reservoir circuit as one dense matrix product per gate.
inline CVec run_circuit_dense(const std::vector<double>& features,
                              const qrc::qsim::ReservoirParams& params,
                              const qrc::ReservoirConfig& config) {
    const int n = config.n_qubits;
    CVec psi(std::size_t{1} << n, C{0, 0});
    psi[0] = 1;
    const int stride = static_cast<int>(config.encoding);
    for (int layer = 1; layer <= config.n_layers; ++layer) {
        const double shift = params.layer_shifts[static_cast<std::size_t>(layer - 1)];
        for (int q = 0; q < n; ++q) {
            const double x = features[static_cast<std::size_t>((q + layer * stride) % 11)];
            const double u = std::min(1.0, std::max(-1.0, 2.0 * x - 1.0));
            const double theta = layer * std::acos(u) + shift;
            psi = matvec(embed_single(n, q, ry_mat(theta)), psi);
        }
        for (int q = 0; q < n; ++q) {
            const auto& r = params.rotation(layer - 1, q);
            psi = matvec(embed_single(n, q, zyz_mat(r.alpha, r.beta, r.gamma)), psi);
        }
        if (n >= 2) {
            for (int q = 0; q + 1 < n; q += 2)
                psi = matvec(zz_pair(n, q, config.coupling_strength), psi);
            for (int q = 1; q + 1 < n; q += 2)
                psi = matvec(zz_pair(n, q, config.coupling_strength), psi);
        }
    }
    return psi;
}

inline CMat observable_matrix(int n_qubits, const qrc::qsim::PauliObservable& obs) {
    using Kind = qrc::qsim::PauliObservable::Kind;
    switch (obs.kind) {
        case Kind::Z: return embed_single(n_qubits, obs.qubit, pauli_z());
        case Kind::X: return embed_single(n_qubits, obs.qubit, pauli_x());
        case Kind::Y: return embed_single(n_qubits, obs.qubit, pauli_y());
        case Kind::ZZ: {
            CMat m = embed_single(n_qubits, obs.qubit, pauli_z());
            return matmul(embed_single(n_qubits, obs.qubit + 1, pauli_z()), m);
        }
        case Kind::XX: {
            CMat m = embed_single(n_qubits, obs.qubit, pauli_x());
            return matmul(embed_single(n_qubits, obs.qubit + 1, pauli_x()), m);
        }
    }
    return identity(std::size_t{1} << n_qubits);
}

inline double expectation_dense(const CVec& psi, int n_qubits,
                                const qrc::qsim::PauliObservable& obs) {
    const CVec p = matvec(observable_matrix(n_qubits, obs), psi);
    C acc{0, 0};
    for (std::size_t i = 0; i < psi.size(); ++i) acc += std::conj(psi[i]) * p[i];
    return acc.real();
}

}  // namespace oracle
