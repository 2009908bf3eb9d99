// integrate.hpp: time evolution of the Bloch tensor under pump, signal and noise

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qpamp/bloch.hpp"
#include "qpamp/model.hpp"

namespace qpamp {

/// Thrown when the state stops being finite. Carries the step and time of detection.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::uint64_t step, double t);
    std::uint64_t step;
    double time;
};

/// Stepping schemes.
///  euler  - forward Euler; with noise this is Euler-Maruyama (Ito).
///  rk4    - classical Runge-Kutta on the deterministic field; noise not allowed.
///  rk4_em - RK4 for the deterministic field plus an Euler-Maruyama (Ito) noise
///           increment evaluated at the start of the step. Same Ito limit as
///           euler, but stable at the step sizes strong pumping needs.
///  rk4_strat - rk4_em plus the drift that turns the Ito increment into the
///           Stratonovich one. Noise on the bias then dephases instead of
///           inflating the Bloch tensor.
enum class Method { euler, rk4, rk4_em, rk4_strat };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

struct IntegratorConfig {
    double dt{1e-3};
    double t_total{1.05e5};
    double t_transient{5000.0};
    std::size_t sample_stride{100};
    Method method{Method::rk4};
    std::uint64_t seed{1};
    std::size_t n_realizations{1};
    std::size_t physicality_cadence{10000};   // steps between positivity checks; 0 disables
    double physicality_tol{kDefaultPhysicalityTolerance};
    std::vector<Component> channels{P0z, P0x};
    /// Halvings of the step the noise path was drawn for. At level L every
    /// 2^L steps share one increment of the seed's path, split by a Brownian
    /// bridge, so refining dt keeps the same realization.
    unsigned noise_refinement{0};

    /// Checks the config alone and against the system it will drive,
    /// including the explicit-stepping stability guard.
    void validate(const QubitPairParams& params, const DriveParams& drive) const;
    [[nodiscard]] std::uint64_t n_steps() const;
    [[nodiscard]] double sample_interval() const { return dt * static_cast<double>(sample_stride); }
};

/// dt * max(A + eps + 4 sqrt(2D/dt), 2 sqrt(delta^2 + g^2)); must not exceed kStabilityBound.
double stability_number(const QubitPairParams& params, const DriveParams& drive, double dt);
inline constexpr double kStabilityBound = 0.05;

/// Two independent standard-normal channels per step from a 64-bit Mersenne
/// Twister via Box-Muller, so the sequence depends only on the seed.
/// With refinement L > 0 each base draw is split into 2^L consecutive
/// normalized sub-increments whose scaled sum reproduces it exactly.
class NoiseStream {
public:
    explicit NoiseStream(std::uint64_t seed, unsigned refinement = 0);

    /// Independent stream for ensemble member `realization`.
    static NoiseStream child(std::uint64_t seed, std::uint64_t realization, unsigned refinement = 0);

    struct Pair {
        double n1;
        double n2;
    };
    Pair next();

private:
    static Pair draw(std::mt19937_64& engine);

    std::mt19937_64 engine_;
    std::mt19937_64 bridge_;
    unsigned refinement_;
    std::vector<Pair> buffer_;
    std::size_t pos_{0};
};

struct PhysicalityWarning {
    std::uint64_t step;
    double t;
    PhysicalityReport report;
};

struct RunMetadata {
    QubitPairParams params;
    DriveParams drive;
    IntegratorConfig config;
    std::size_t realization{0};
    std::size_t physicality_failures{0};
    std::vector<PhysicalityWarning> warnings;   // first few failures only
};

/// Sampled trajectories on a uniform grid starting at t = 0.
struct TimeSeries {
    double sample_interval{0.0};
    std::vector<double> t;
    std::vector<std::string> names;
    std::vector<std::vector<double>> channels;
    RunMetadata meta;

    [[nodiscard]] std::size_t size() const { return t.size(); }
    /// Throws std::out_of_range if absent.
    [[nodiscard]] const std::vector<double>& channel(std::string_view name) const;
    [[nodiscard]] bool has_channel(std::string_view name) const;
};

/// Default column name of a recorded component: Z1/X1/Y1 for the first
/// qubit's Bloch vector, Pi_ab otherwise.
std::string channel_name(Component c);

/// Advance one step of size dt from time t. `noise` may be null when D = 0.
BlochTensor step(const BlochTensor& state, double t, double dt, const QubitPairParams& params,
                 const DriveParams& drive, Method method, NoiseStream* noise);

/// Integrates from t = 0 to t_total, recording every sample_stride steps (t = 0 included).
TimeSeries integrate(const QubitPairParams& params, const DriveParams& drive,
                     const IntegratorConfig& config, const BlochTensor& initial,
                     std::size_t realization = 0);

/// n_realizations independent trajectories, ordered by realization index.
std::vector<TimeSeries> run_ensemble(const QubitPairParams& params, const DriveParams& drive,
                                     const IntegratorConfig& config, const BlochTensor& initial);

}  // namespace qpamp
