// oracle.hpp: independent reference implementations used by the tests.
// Nothing here calls into the library's state-space code: density matrices,
// Hamiltonians and the dissipator are rebuilt from Pauli matrices directly.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qpamp/bloch.hpp"

namespace oracle {

using cd = std::complex<double>;
using M2 = Eigen::Matrix2cd;
using M4 = Eigen::Matrix4cd;

inline const std::array<M2, 4>& paulis() {
    static const std::array<M2, 4> s = [] {
        std::array<M2, 4> p;
        p[0] << 1, 0, 0, 1;
        p[1] << 0, 1, 1, 0;
        p[2] << 0, cd(0, -1), cd(0, 1), 0;
        p[3] << 1, 0, 0, -1;
        return p;
    }();
    return s;
}

inline M4 kron(const M2& a, const M2& b) {
    M4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

inline int pauli_index(char c) {
    switch (c) {
        case '0': return 0;
        case 'x': return 1;
        case 'y': return 2;
        default: return 3;
    }
}

/// (first slot, second slot) Pauli indices of a stored component, from its name.
inline std::pair<int, int> slots(std::size_t c) {
    const auto name = qpamp::kComponentNames[c];
    return {pauli_index(name[0]), pauli_index(name[1])};
}

inline M4 basis(std::size_t c) {
    const auto [a, b] = slots(c);
    return kron(paulis()[a], paulis()[b]);
}

inline M4 density(const qpamp::BlochTensor& s) {
    M4 rho = M4::Identity();
    for (std::size_t c = 0; c < qpamp::kNumComponents; ++c) rho += s.v[c] * basis(c);
    return rho / 4.0;
}

inline qpamp::BlochTensor project(const M4& m) {
    qpamp::BlochTensor s;
    for (std::size_t c = 0; c < qpamp::kNumComponents; ++c) s.v[c] = (m * basis(c)).trace().real();
    return s;
}

inline M4 hamiltonian(const qpamp::QubitPairParams& p, double e1, double e2) {
    const auto& s = paulis();
    return -0.5 * (p.delta1 * kron(s[3], s[0]) + p.delta2 * kron(s[0], s[3]) + e1 * kron(s[1], s[0])
                   + e2 * kron(s[0], s[1]))
         + p.g * kron(s[1], s[1]);
}

/// Damping rate of one slot for a given Pauli label: transverse components
/// dephase, longitudinal ones relax.
inline double slot_rate(int pauli, double gamma_phi, double gamma_r) {
    if (pauli == 0) return 0.0;
    return pauli == 3 ? gamma_r : gamma_phi;
}

/// d rho/dt = -i[H, rho] + damping, the damping acting on each Pauli-product
/// coefficient with the sum of its slot rates and relaxing the pure-z
/// coefficients towards their equilibrium values.
inline qpamp::BlochTensor rhs(const qpamp::BlochTensor& s, double e1, double e2, const qpamp::QubitPairParams& p) {
    const M4 rho = density(s);
    const M4 h = hamiltonian(p, e1, e2);
    const M4 unitary = cd(0, -1) * (h * rho - rho * h);
    qpamp::BlochTensor out = project(unitary);
    for (std::size_t c = 0; c < qpamp::kNumComponents; ++c) {
        const auto [a, b] = slots(c);
        const double rate = slot_rate(a, p.gamma_phi1, p.gamma_r1) + slot_rate(b, p.gamma_phi2, p.gamma_r2);
        double target = 0.0;
        if (a == 0 && b == 3) target = p.zt2;
        if (a == 3 && b == 0) target = p.zt1;
        if (a == 3 && b == 3) target = p.zt1 * p.zt2;
        out.v[c] -= rate * (s.v[c] - target);
    }
    return out;
}

/// Single-qubit Bloch vector under H = -1/2 (delta sz + eps sx): ds/dt = s x b, b = (eps, 0, delta).
using Vec3 = std::array<double, 3>;

inline Vec3 qubit_rhs(const Vec3& s, double delta, double eps, double gphi, double gr, double zt) {
    return {s[1] * delta - gphi * s[0], s[2] * eps - s[0] * delta - gphi * s[1], -s[1] * eps - gr * (s[2] - zt)};
}

inline qpamp::BlochTensor random_state(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    qpamp::BlochTensor s;
    for (double& x : s.v) x = u(rng);
    return s;
}

inline qpamp::QubitPairParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(0.1, 3.0), rate(0.0, 0.5), z(-1.0, 1.0);
    qpamp::QubitPairParams p;
    p.delta1 = pos(rng);
    p.delta2 = pos(rng);
    p.g = pos(rng) - 0.1;
    p.gamma_phi1 = rate(rng);
    p.gamma_phi2 = rate(rng);
    p.gamma_r1 = rate(rng);
    p.gamma_r2 = rate(rng);
    p.zt1 = z(rng);
    p.zt2 = z(rng);
    return p;
}

/// Sorted pairwise gaps of the eigenvalues of a Hermitian matrix.
inline std::vector<double> eigen_gaps(const M4& h) {
    Eigen::SelfAdjointEigenSolver<M4> es(h);
    const auto& ev = es.eigenvalues();
    std::vector<double> gaps;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) gaps.push_back(std::abs(ev(j) - ev(i)));
    std::sort(gaps.begin(), gaps.end());
    return gaps;
}

}  // namespace oracle
