#include "qpamp/bloch.hpp"

#include <cmath>
#include <complex>

namespace qpamp {

namespace {

using M2 = Eigen::Matrix2cd;
using C = std::complex<double>;

const std::array<M2, 4>& paulis() {
    static const std::array<M2, 4> mats = [] {
        std::array<M2, 4> m;
        m[0] << 1, 0, 0, 1;
        m[1] << 0, 1, 1, 0;
        m[2] << 0, C(0, -1), C(0, 1), 0;
        m[3] << 1, 0, 0, -1;
        return m;
    }();
    return mats;
}

Eigen::Matrix4cd pauli_product(int a, int b) {
    const auto& s = paulis();
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = s[a](i, j) * s[b];
    return out;
}

int pauli_index(char c) {
    switch (c) {
        case '0': return 0;
        case 'x': return 1;
        case 'y': return 2;
        default: return 3;
    }
}

}  // namespace

std::optional<Component> component_from_name(std::string_view name) {
    if (name == "Z1") return P0z;
    if (name == "X1") return P0x;
    if (name == "Y1") return P0y;
    if (name.starts_with("Pi_")) name.remove_prefix(3);
    for (std::size_t i = 0; i < kNumComponents; ++i)
        if (kComponentNames[i] == name) return static_cast<Component>(i);
    return std::nullopt;
}

PauliPair pauli_pair(Component c) {
    const auto name = kComponentNames[c];
    return {pauli_index(name[0]), pauli_index(name[1])};
}

double BlochTensor::squared_norm() const {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
}

bool BlochTensor::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

BlochTensor& BlochTensor::operator+=(const BlochTensor& o) {
    for (std::size_t i = 0; i < kNumComponents; ++i) v[i] += o.v[i];
    return *this;
}

BlochTensor rhs(const BlochTensor& state, double eps1, double eps2, const QubitPairParams& params) {
    BlochTensor out;
    rhs_into(state.v.data(), eps1, eps2, params, out.v.data());
    return out;
}

Eigen::Matrix4cd to_density_matrix(const BlochTensor& state) {
    Eigen::Matrix4cd rho = pauli_product(0, 0);
    for (std::size_t i = 0; i < kNumComponents; ++i) {
        const auto [a, b] = pauli_pair(static_cast<Component>(i));
        rho += state.v[i] * pauli_product(a, b);
    }
    return 0.25 * rho;
}

BlochTensor from_density_matrix(const Eigen::Matrix4cd& rho) {
    BlochTensor out;
    for (std::size_t i = 0; i < kNumComponents; ++i) {
        const auto [a, b] = pauli_pair(static_cast<Component>(i));
        out.v[i] = (rho * pauli_product(a, b)).trace().real();
    }
    return out;
}

double purity(const BlochTensor& state) {
    return 0.25 * (1.0 + state.squared_norm());
}

BlochTensor thermal_product_state(const QubitPairParams& params) {
    BlochTensor s;
    s[P0z] = params.zt2;
    s[Pz0] = params.zt1;
    s[Pzz] = params.zt1 * params.zt2;
    return s;
}

PhysicalityReport physicality_check(const BlochTensor& state, double tol) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(to_density_matrix(state),
                                                             Eigen::EigenvaluesOnly);
    const double min_ev = eig.eigenvalues().minCoeff();
    const double p = purity(state);
    return {p, min_ev, min_ev >= -tol && p <= 1.0 + tol};
}

}  // namespace qpamp
