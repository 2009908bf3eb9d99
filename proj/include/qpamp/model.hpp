// model.hpp: static description of a pair of coupled, driven qubits

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qpamp {

/// Thrown when a parameter or configuration value violates its invariant.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Static system: two qubits with tunneling amplitudes, a sigma_x-sigma_x
/// coupling, phenomenological damping and equilibrium polarizations.
/// Energies are measured in units of the tunneling amplitude of the
/// identical-qubit reference (Delta = 1), times in 1/Delta.
struct QubitPairParams {
    double delta1{1.0};
    double delta2{1.0};
    double g{0.0};
    double gamma_phi1{0.0};   // dephasing
    double gamma_phi2{0.0};
    double gamma_r1{0.0};     // relaxation
    double gamma_r2{0.0};
    double zt1{1.0};          // equilibrium z-polarization
    double zt2{1.0};

    /// Identical qubits with shared rates, the configuration used by every preset.
    static QubitPairParams identical(double delta, double g, double gamma_phi,
                                     double gamma_r, double zt = 1.0);

    /// Throws InvalidParameter naming the offending field.
    void validate() const;
};

/// Drive applied to both qubits: pump A sin(w t) plus weak signal
/// eps sin(w~ t + phase), plus independent white noise of intensity D per qubit.
struct DriveParams {
    double amp_pump{0.0};
    double omega_pump{0.0};
    double amp_weak{0.0};
    double omega_weak{0.0};
    double noise_d{0.0};
    double weak_phase{0.0};   // sensitivity knob; zero reproduces the reference drive

    void validate() const;
};

/// Inter-level transition frequencies of identical coupled qubits, ordered
/// (2 sqrt(d^2+g^2), sqrt(d^2+g^2) - g, sqrt(d^2+g^2) + g, 2 g).
struct TransitionFrequencies {
    double omega1;
    double omega2;
    double omega3;
    double omega4;

    [[nodiscard]] std::array<double, 4> as_array() const { return {omega1, omega2, omega3, omega4}; }
    /// 1-based lookup, matching the "omegaN" names accepted in configs.
    [[nodiscard]] double operator[](int n) const;
};

TransitionFrequencies transition_frequencies(double delta, double g);

/// H = -1/2 [d1 sz(x)I + d2 I(x)sz + e1 sx(x)I + e2 I(x)sx] + g sx(x)sx in the
/// product basis |q1 q2>, with q1 the left tensor factor.
Eigen::Matrix4cd hamiltonian_matrix(const QubitPairParams& params, double eps1, double eps2);

struct DriveValue {
    double eps1;
    double eps2;
};

/// Instantaneous bias on each qubit. `noise1`/`noise2` are standard-normal
/// samples; the white-noise term is discretized as sqrt(2D/dt) n_j.
DriveValue drive_value(const DriveParams& drive, double t, double noise1, double noise2, double dt);

/// Deterministic part of the drive (identical for both qubits).
inline double deterministic_drive(const DriveParams& drive, double t) {
    return drive.amp_pump * std::sin(drive.omega_pump * t)
         + drive.amp_weak * std::sin(drive.omega_weak * t + drive.weak_phase);
}

}  // namespace qpamp
