// bloch.hpp: two-qubit Bloch tensor and its master equations

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "qpamp/model.hpp"

namespace qpamp {

/// Component index of the Bloch tensor Pi_ab, where rho = 1/4 sum Pi_ab s_a(x)s_b.
/// The first letter is the operator on qubit 1 (left tensor factor), the second
/// the operator on qubit 2; "0" is the identity. Pi_00 = 1 is implicit.
enum Component : std::size_t {
    P0x, P0y, P0z,
    Px0, Py0, Pz0,
    Pxx, Pxy, Pyx, Pxz, Pzx, Pyy, Pyz, Pzy, Pzz,
    kNumComponents
};

inline constexpr std::array<std::string_view, kNumComponents> kComponentNames = {
    "0x", "0y", "0z", "x0", "y0", "z0", "xx", "xy", "yx", "xz", "zx", "yy", "yz", "zy", "zz"};

/// Accepts "0z", "Pi_0z" and the observable aliases "Z1" (= 0z), "X1" (= 0x), "Y1" (= 0y).
std::optional<Component> component_from_name(std::string_view name);

/// Pauli label (0, x, y, z -> 0..3) of each slot of a component.
struct PauliPair {
    int first;
    int second;
};
PauliPair pauli_pair(Component c);

struct BlochTensor {
    std::array<double, kNumComponents> v{};

    double& operator[](Component c) { return v[c]; }
    double operator[](Component c) const { return v[c]; }

    [[nodiscard]] double squared_norm() const;
    [[nodiscard]] bool all_finite() const;

    BlochTensor& operator+=(const BlochTensor& o);
    friend BlochTensor operator+(BlochTensor a, const BlochTensor& b) { return a += b; }
    friend BlochTensor operator*(double s, BlochTensor a) {
        for (double& x : a.v) x *= s;
        return a;
    }
    friend bool operator==(const BlochTensor&, const BlochTensor&) = default;
};

/// Hamiltonian and damping part of the master equations: everything except
/// the terms proportional to the drives eps1, eps2.
inline void static_rhs(const double* s, const QubitPairParams& p, double* out) {
    const double g2 = 2.0 * p.g;
    const double d1 = p.delta1, d2 = p.delta2;
    const double gp1 = p.gamma_phi1, gp2 = p.gamma_phi2;
    const double gr1 = p.gamma_r1, gr2 = p.gamma_r2;

    out[P0x] = d2 * s[P0y] - gp2 * s[P0x];
    out[P0y] = -d2 * s[P0x] - g2 * s[Pxz] - gp2 * s[P0y];
    out[P0z] = g2 * s[Pxy] - gr2 * (s[P0z] - p.zt2);

    out[Px0] = d1 * s[Py0] - gp1 * s[Px0];
    out[Py0] = -d1 * s[Px0] - g2 * s[Pzx] - gp1 * s[Py0];
    out[Pz0] = g2 * s[Pyx] - gr1 * (s[Pz0] - p.zt1);

    out[Pxx] = d2 * s[Pxy] + d1 * s[Pyx] - (gp1 + gp2) * s[Pxx];
    out[Pxy] = -g2 * s[P0z] - d2 * s[Pxx] + d1 * s[Pyy] - (gp1 + gp2) * s[Pxy];
    out[Pyx] = -g2 * s[Pz0] - d1 * s[Pxx] + d2 * s[Pyy] - (gp1 + gp2) * s[Pyx];
    out[Pxz] = g2 * s[P0y] + d1 * s[Pyz] - (gp1 + gr2) * s[Pxz];
    out[Pzx] = g2 * s[Py0] + d2 * s[Pzy] - (gp2 + gr1) * s[Pzx];
    out[Pyy] = -d1 * s[Pxy] - d2 * s[Pyx] - (gp1 + gp2) * s[Pyy];
    out[Pyz] = -d1 * s[Pxz] - (gp1 + gr2) * s[Pyz];
    out[Pzy] = -d2 * s[Pzx] - (gr1 + gp2) * s[Pzy];
    out[Pzz] = -(gr1 + gr2) * (s[Pzz] - p.zt1 * p.zt2);
}

/// Terms proportional to the drives. Linear in the state and in (eps1, eps2).
/// The eps1 coupling of Pyx goes through Pzx, the sign-mirror of the eps1 Pyx
/// term in the Pzx equation; this keeps the generator antisymmetric.
inline void drive_rhs(const double* s, double e1, double e2, double* out) {
    out[P0x] = 0.0;
    out[P0y] = e2 * s[P0z];
    out[P0z] = -e2 * s[P0y];

    out[Px0] = 0.0;
    out[Py0] = e1 * s[Pz0];
    out[Pz0] = -e1 * s[Py0];

    out[Pxx] = 0.0;
    out[Pxy] = e2 * s[Pxz];
    out[Pyx] = e1 * s[Pzx];
    out[Pxz] = -e2 * s[Pxy];
    out[Pzx] = -e1 * s[Pyx];
    out[Pyy] = e2 * s[Pyz] + e1 * s[Pzy];
    out[Pyz] = -e2 * s[Pyy] + e1 * s[Pzz];
    out[Pzy] = -e1 * s[Pyy] + e2 * s[Pzz];
    out[Pzz] = -e1 * s[Pyz] - e2 * s[Pzy];
}

/// Full right-hand side, raw-array form used by the integrators.
inline void rhs_into(const double* s, double e1, double e2, const QubitPairParams& p, double* out) {
    static_rhs(s, p, out);
    double d[kNumComponents];
    drive_rhs(s, e1, e2, d);
    for (std::size_t i = 0; i < kNumComponents; ++i) out[i] += d[i];
}

/// dPi/dt of the fifteen-component master equation at drive values (eps1, eps2).
BlochTensor rhs(const BlochTensor& state, double eps1, double eps2, const QubitPairParams& params);

/// rho = 1/4 sum_ab Pi_ab s_a (x) s_b, basis ordered |q1 q2> with q1 the left factor.
Eigen::Matrix4cd to_density_matrix(const BlochTensor& state);

/// Pi_ab = Tr(rho s_a (x) s_b) for every stored component.
BlochTensor from_density_matrix(const Eigen::Matrix4cd& rho);

/// Tr rho^2 = (1 + sum Pi^2) / 4.
double purity(const BlochTensor& state);

/// Uncorrelated thermal product: Pi_0z = zt2, Pi_z0 = zt1, Pi_zz = zt1 zt2.
BlochTensor thermal_product_state(const QubitPairParams& params);

struct PhysicalityReport {
    double purity;
    double min_eigenvalue;
    bool pass;
};

/// Monitors positivity and purity of the reconstructed density matrix.
PhysicalityReport physicality_check(const BlochTensor& state, double tol);

inline constexpr double kPurityTolerance = 1e-6;
inline constexpr double kDefaultPhysicalityTolerance = 1e-3;

}  // namespace qpamp
