// scenario.hpp: full simulate-and-analyse pipeline, dt convergence check, sweeps

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qpamp/config.hpp"
#include "qpamp/spectrum.hpp"

namespace qpamp {

/// Ensemble-averaged spectra and labeled peaks of one configuration.
struct Analysis {
    TimeSeries trajectory;   // realization 0
    Spectrum spec_z;
    Spectrum spec_x;
    PeakSet peaks_z;
    PeakSet peaks_x;
    std::size_t physicality_failures{0};
};

/// Integrates every realization of `cfg` and analyses the Z1 and X1 channels.
/// Without `keep_trajectory` the returned trajectory is empty.
Analysis analyze(const ScenarioConfig& cfg, bool keep_trajectory = true);

/// Labeled peaks of `spec` with the config's thresholds and tolerances.
PeakSet detect_peaks(const Spectrum& spec, const ScenarioConfig& cfg);

/// Matching tolerance in frequency units for a spectrum with bin spacing `bin`.
double tolerance(const ScenarioConfig& cfg, double bin);

struct Headline {
    double max_height{0.0};   // highest Z1 peak
    double i_a{0.0};
    double i_eps{0.0};
    double ratio{0.0};
    double i_pm{0.0};
};

struct ConvergenceCheck {
    Headline coarse;
    Headline fine;
    double max_rel_change{0.0};
    bool pass{false};
};

inline constexpr double kConvergenceTolerance = 0.02;

struct ScenarioResult {
    ScenarioConfig config;
    Analysis analysis;
    std::optional<Analysis> pump_only;   // companion run when both tones are on
    AmplificationMetrics metrics;
    Headline headline;
    std::optional<ConvergenceCheck> convergence;
    std::vector<std::filesystem::path> written;
};

Headline headline_of(const ScenarioConfig& cfg, const Analysis& a, const AmplificationMetrics& m);

/// Relative change between headline metrics, ignoring metrics that are zero in both runs.
double max_relative_change(const Headline& a, const Headline& b);

/// Runs the scenario (and a pump-only companion when the weak signal is on),
/// optionally repeats it at dt/2, and writes artifacts to cfg.out_dir if set.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

enum class SweepAxis { epsilon, noise_d, omega_weak, g };
SweepAxis sweep_axis_from_string(std::string_view s);
std::string_view to_string(SweepAxis a);

/// Applies one sweep value to a copy of `base`.
ScenarioConfig with_axis_value(const ScenarioConfig& base, SweepAxis axis, double value);

struct SweepRow {
    double value{0.0};
    std::string status{"ok"};
    AmplificationMetrics metrics;
};

struct SweepResult {
    SweepAxis axis{SweepAxis::epsilon};
    std::vector<SweepRow> rows;
    std::optional<BetaFit> beta;
    std::optional<std::string> beta_error;
    std::vector<std::filesystem::path> written;
};

/// One scenario per value (without the dt/2 repetition). Failing points keep
/// their error message in `status`; the other rows are still reported.
SweepResult run_sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values);

}  // namespace qpamp
