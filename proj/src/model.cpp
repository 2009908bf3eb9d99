#include "qpamp/model.hpp"

#include <cmath>
#include <complex>

namespace qpamp {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter(what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

QubitPairParams QubitPairParams::identical(double delta, double g, double gamma_phi,
                                           double gamma_r, double zt) {
    QubitPairParams p;
    p.delta1 = p.delta2 = delta;
    p.g = g;
    p.gamma_phi1 = p.gamma_phi2 = gamma_phi;
    p.gamma_r1 = p.gamma_r2 = gamma_r;
    p.zt1 = p.zt2 = zt;
    return p;
}

void QubitPairParams::validate() const {
    require(finite(delta1) && delta1 > 0, "delta1 must be positive and finite");
    require(finite(delta2) && delta2 > 0, "delta2 must be positive and finite");
    require(finite(g), "g must be finite");
    require(finite(gamma_phi1) && gamma_phi1 >= 0, "gamma_phi1 must be >= 0");
    require(finite(gamma_phi2) && gamma_phi2 >= 0, "gamma_phi2 must be >= 0");
    require(finite(gamma_r1) && gamma_r1 >= 0, "gamma_r1 must be >= 0");
    require(finite(gamma_r2) && gamma_r2 >= 0, "gamma_r2 must be >= 0");
    require(finite(zt1) && std::abs(zt1) <= 1, "zt1 must satisfy |zt1| <= 1");
    require(finite(zt2) && std::abs(zt2) <= 1, "zt2 must satisfy |zt2| <= 1");
}

void DriveParams::validate() const {
    require(finite(amp_pump) && amp_pump >= 0, "amp_pump must be >= 0");
    require(finite(amp_weak) && amp_weak >= 0, "amp_weak must be >= 0");
    require(finite(noise_d) && noise_d >= 0, "noise_d must be >= 0");
    require(finite(omega_pump) && finite(omega_weak) && finite(weak_phase),
            "drive frequencies and phase must be finite");
    require(amp_pump == 0 || omega_pump > 0, "omega_pump must be > 0 when amp_pump is nonzero");
    require(amp_weak == 0 || omega_weak > 0, "omega_weak must be > 0 when amp_weak is nonzero");
}

double TransitionFrequencies::operator[](int n) const {
    switch (n) {
        case 1: return omega1;
        case 2: return omega2;
        case 3: return omega3;
        case 4: return omega4;
        default: throw InvalidParameter("transition index must be 1..4, got " + std::to_string(n));
    }
}

TransitionFrequencies transition_frequencies(double delta, double g) {
    require(finite(delta) && delta > 0, "delta must be positive and finite");
    require(finite(g) && g >= 0, "g must be non-negative and finite");
    const double r = std::hypot(delta, g);
    return {2.0 * r, r - g, r + g, 2.0 * g};
}

Eigen::Matrix4cd hamiltonian_matrix(const QubitPairParams& params, double eps1, double eps2) {
    using M2 = Eigen::Matrix2cd;
    M2 id = M2::Identity();
    M2 sx;
    sx << 0, 1, 1, 0;
    M2 sz;
    sz << 1, 0, 0, -1;

    auto kron = [](const M2& a, const M2& b) {
        Eigen::Matrix4cd out;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        return out;
    };

    Eigen::Matrix4cd h = -0.5 * (params.delta1 * kron(sz, id) + params.delta2 * kron(id, sz)
                                 + eps1 * kron(sx, id) + eps2 * kron(id, sx))
                         + params.g * kron(sx, sx);
    return h;
}

DriveValue drive_value(const DriveParams& drive, double t, double noise1, double noise2, double dt) {
    const double base = deterministic_drive(drive, t);
    if (drive.noise_d == 0.0) return {base, base};
    require(dt > 0, "dt must be positive when noise_d > 0");
    const double scale = std::sqrt(2.0 * drive.noise_d / dt);
    return {base + scale * noise1, base + scale * noise2};
}

}  // namespace qpamp
