#include "qpamp/integrate.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "qpamp/parallel.hpp"

namespace qpamp {

namespace {

constexpr std::size_t N = kNumComponents;
constexpr std::size_t kMaxStoredWarnings = 32;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

bool finite_sum(const double* s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) acc += s[i];
    return std::isfinite(acc);
}

// One step in place. `e0` is the deterministic drive at t; it is updated to the
// drive at t + dt so consecutive RK4 steps share the endpoint evaluation.
struct Stepper {
    const QubitPairParams& p;
    const DriveParams& drive;
    Method method;
    double dt;
    double noise_scale;   // sqrt(2 D dt)

    void advance(double* s, double t, double& e0, NoiseStream* noise) const {
        switch (method) {
            case Method::euler: euler(s, e0, noise); e0 = deterministic_drive(drive, t + dt); break;
            case Method::rk4: rk4(s, t, e0); break;
            case Method::rk4_em:
            case Method::rk4_strat: {
                double kick[N];
                const bool noisy = noise_scale > 0.0;
                if (noisy) {
                    const auto [n1, n2] = noise->next();
                    drive_rhs(s, noise_scale * n1, noise_scale * n2, kick);
                    if (method == Method::rk4_strat) add_stratonovich_drift(s, kick);
                }
                rk4(s, t, e0);
                if (noisy)
                    for (std::size_t i = 0; i < N; ++i) s[i] += kick[i];
                break;
            }
        }
    }

    // Ito form of the Stratonovich noise term: dt * D * (G1^2 + G2^2) s, where
    // G_j s is the drive field with unit bias on qubit j alone.
    void add_stratonovich_drift(const double* s, double* out) const {
        double g[N], gg[N];
        const double w = 0.5 * noise_scale * noise_scale;   // D dt
        for (int q = 0; q < 2; ++q) {
            drive_rhs(s, q == 0 ? 1.0 : 0.0, q == 1 ? 1.0 : 0.0, g);
            drive_rhs(g, q == 0 ? 1.0 : 0.0, q == 1 ? 1.0 : 0.0, gg);
            for (std::size_t i = 0; i < N; ++i) out[i] += w * gg[i];
        }
    }

    void euler(double* s, double e0, NoiseStream* noise) const {
        double e1 = e0, e2 = e0;
        if (noise_scale > 0.0) {
            const auto [n1, n2] = noise->next();
            // sqrt(2D/dt) n_j, folded with the factor dt below
            e1 += noise_scale / dt * n1;
            e2 += noise_scale / dt * n2;
        }
        double k[N];
        rhs_into(s, e1, e2, p, k);
        for (std::size_t i = 0; i < N; ++i) s[i] += dt * k[i];
    }

    void rk4(double* s, double t, double& e0) const {
        const double em = deterministic_drive(drive, t + 0.5 * dt);
        const double e1 = deterministic_drive(drive, t + dt);
        double k1[N], k2[N], k3[N], k4[N], tmp[N];
        rhs_into(s, e0, e0, p, k1);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
        rhs_into(tmp, em, em, p, k2);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
        rhs_into(tmp, em, em, p, k3);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = s[i] + dt * k3[i];
        rhs_into(tmp, e1, e1, p, k4);
        for (std::size_t i = 0; i < N; ++i) s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        e0 = e1;
    }
};

void check_method(Method method, const DriveParams& drive) {
    if (method == Method::rk4 && drive.noise_d > 0.0)
        throw InvalidParameter("method rk4 is deterministic; use euler, rk4_em or rk4_strat when noise_d > 0");
}

}  // namespace

DivergenceError::DivergenceError(std::uint64_t step_, double t)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "state diverged (non-finite) at step " << step_ << ", t = " << t;
          return os.str();
      }()),
      step(step_),
      time(t) {}

std::string_view to_string(Method m) {
    switch (m) {
        case Method::euler: return "euler";
        case Method::rk4: return "rk4";
        case Method::rk4_em: return "rk4_em";
        case Method::rk4_strat: return "rk4_strat";
    }
    return "?";
}

Method method_from_string(std::string_view s) {
    if (s == "euler") return Method::euler;
    if (s == "rk4") return Method::rk4;
    if (s == "rk4_em") return Method::rk4_em;
    if (s == "rk4_strat") return Method::rk4_strat;
    throw InvalidParameter("unknown method '" + std::string(s) + "' (expected euler, rk4, rk4_em or rk4_strat)");
}

double stability_number(const QubitPairParams& params, const DriveParams& drive, double dt) {
    const double noise = drive.noise_d > 0.0 ? 4.0 * std::sqrt(2.0 * drive.noise_d / dt) : 0.0;
    const double bias = drive.amp_pump + drive.amp_weak + noise;
    const double level = 2.0 * std::hypot(std::max(params.delta1, params.delta2), params.g);
    return dt * std::max(bias, level);
}

void IntegratorConfig::validate(const QubitPairParams& params, const DriveParams& drive) const {
    if (!(std::isfinite(dt) && dt > 0)) throw InvalidParameter("dt must be positive");
    if (!(std::isfinite(t_total) && t_total > 0)) throw InvalidParameter("t_total must be positive");
    if (!(t_transient >= 0 && t_transient < t_total))
        throw InvalidParameter("t_transient must satisfy 0 <= t_transient < t_total");
    if (sample_stride < 1) throw InvalidParameter("sample_stride must be >= 1");
    if (n_realizations < 1) throw InvalidParameter("realizations must be >= 1");
    if (!(physicality_tol > 0)) throw InvalidParameter("physicality tolerance must be positive");
    if (channels.empty()) throw InvalidParameter("at least one channel must be recorded");
    check_method(method, drive);
    const double s = stability_number(params, drive, dt);
    if (s > kStabilityBound) {
        std::ostringstream os;
        os << "dt = " << dt << " violates the stability guard: dt * max(A + eps + 4 sqrt(2D/dt), "
           << "2 sqrt(delta^2 + g^2)) = " << s << " > " << kStabilityBound;
        throw InvalidParameter(os.str());
    }
}

std::uint64_t IntegratorConfig::n_steps() const {
    return static_cast<std::uint64_t>(std::llround(t_total / dt));
}

NoiseStream::NoiseStream(std::uint64_t seed, unsigned refinement)
    : engine_(seed), bridge_(splitmix64(seed ^ 0x6272696467650000ULL)), refinement_(refinement) {
    if (refinement > 20) throw InvalidParameter("noise refinement must be at most 20");
}

NoiseStream NoiseStream::child(std::uint64_t seed, std::uint64_t realization, unsigned refinement) {
    return NoiseStream(splitmix64(splitmix64(seed) ^ splitmix64(~realization)), refinement);
}

NoiseStream::Pair NoiseStream::draw(std::mt19937_64& engine) {
    constexpr double kInv53 = 1.0 / 9007199254740992.0;   // 2^-53
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    const double u1 = 1.0 - static_cast<double>(engine() >> 11) * kInv53;   // (0, 1]
    const double u2 = static_cast<double>(engine() >> 11) * kInv53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

NoiseStream::Pair NoiseStream::next() {
    if (refinement_ == 0) return draw(engine_);
    if (pos_ == buffer_.size()) {
        // Unit-variance increment z over a step, split into halves (z +- xi)/sqrt(2)
        // with xi independent; each half again has unit variance on its own step.
        buffer_.assign(1, draw(engine_));
        for (unsigned level = 0; level < refinement_; ++level) {
            std::vector<Pair> finer;
            finer.reserve(2 * buffer_.size());
            for (const Pair& z : buffer_) {
                const Pair xi = draw(bridge_);
                finer.push_back({(z.n1 + xi.n1) * std::numbers::sqrt2 / 2, (z.n2 + xi.n2) * std::numbers::sqrt2 / 2});
                finer.push_back({(z.n1 - xi.n1) * std::numbers::sqrt2 / 2, (z.n2 - xi.n2) * std::numbers::sqrt2 / 2});
            }
            buffer_ = std::move(finer);
        }
        pos_ = 0;
    }
    return buffer_[pos_++];
}

const std::vector<double>& TimeSeries::channel(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return channels[i];
    throw std::out_of_range("time series has no channel '" + std::string(name) + "'");
}

bool TimeSeries::has_channel(std::string_view name) const {
    for (const auto& n : names)
        if (n == name) return true;
    return false;
}

std::string channel_name(Component c) {
    switch (c) {
        case P0z: return "Z1";
        case P0x: return "X1";
        case P0y: return "Y1";
        default: return "Pi_" + std::string(kComponentNames[c]);
    }
}

BlochTensor step(const BlochTensor& state, double t, double dt, const QubitPairParams& params,
                 const DriveParams& drive, Method method, NoiseStream* noise) {
    check_method(method, drive);
    if (!(dt > 0)) throw InvalidParameter("dt must be positive");
    if (drive.noise_d > 0.0 && noise == nullptr) throw InvalidParameter("noise_d > 0 requires a noise stream");
    const Stepper stepper{params, drive, method, dt, std::sqrt(2.0 * drive.noise_d * dt)};
    BlochTensor out = state;
    double e0 = deterministic_drive(drive, t);
    stepper.advance(out.v.data(), t, e0, noise);
    if (!finite_sum(out.v.data())) throw DivergenceError(0, t + dt);
    return out;
}

TimeSeries integrate(const QubitPairParams& params, const DriveParams& drive,
                     const IntegratorConfig& config, const BlochTensor& initial,
                     std::size_t realization) {
    params.validate();
    drive.validate();
    config.validate(params, drive);

    const std::uint64_t n_steps = config.n_steps();
    const std::size_t n_samples = static_cast<std::size_t>(n_steps / config.sample_stride) + 1;

    TimeSeries ts;
    ts.sample_interval = config.sample_interval();
    ts.meta = RunMetadata{params, drive, config, realization, 0, {}};
    ts.t.reserve(n_samples);
    for (Component c : config.channels) {
        ts.names.push_back(channel_name(c));
        ts.channels.emplace_back().reserve(n_samples);
    }

    NoiseStream noise = NoiseStream::child(config.seed, realization, config.noise_refinement);
    const Stepper stepper{params, drive, config.method, config.dt,
                          std::sqrt(2.0 * drive.noise_d * config.dt)};

    double s[N];
    for (std::size_t i = 0; i < N; ++i) s[i] = initial.v[i];
    double e0 = deterministic_drive(drive, 0.0);

    std::uint64_t until_sample = 0;
    std::uint64_t until_check = config.physicality_cadence;
    for (std::uint64_t n = 0;; ++n) {
        const double t = static_cast<double>(n) * config.dt;
        if (until_sample == 0) {
            ts.t.push_back(t);
            for (std::size_t c = 0; c < config.channels.size(); ++c)
                ts.channels[c].push_back(s[config.channels[c]]);
            until_sample = config.sample_stride;
        }
        --until_sample;

        if (config.physicality_cadence > 0 && until_check-- == 0) {
            until_check = config.physicality_cadence - 1;
            BlochTensor snapshot;
            for (std::size_t i = 0; i < N; ++i) snapshot.v[i] = s[i];
            const auto report = physicality_check(snapshot, config.physicality_tol);
            if (!report.pass) {
                if (ts.meta.physicality_failures == 0)
                    std::cerr << "warning: state left the physical region at t = " << t
                              << " (purity " << report.purity << ", min eigenvalue "
                              << report.min_eigenvalue << ")\n";
                if (ts.meta.warnings.size() < kMaxStoredWarnings)
                    ts.meta.warnings.push_back({n, t, report});
                ++ts.meta.physicality_failures;
            }
        }

        if (n == n_steps) break;
        stepper.advance(s, t, e0, &noise);
        if (!finite_sum(s)) throw DivergenceError(n + 1, t + config.dt);
    }
    return ts;
}

std::vector<TimeSeries> run_ensemble(const QubitPairParams& params, const DriveParams& drive,
                                     const IntegratorConfig& config, const BlochTensor& initial) {
    if (config.n_realizations < 1) throw InvalidParameter("realizations must be >= 1");
    return parallel_map(config.n_realizations, [&](std::size_t r) {
        return integrate(params, drive, config, initial, r);
    });
}

}  // namespace qpamp
