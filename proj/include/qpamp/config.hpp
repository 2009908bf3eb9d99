// config.hpp: scenario configuration: flat key = value files and built-in presets

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qpamp/integrate.hpp"
#include "qpamp/model.hpp"
#include "qpamp/spectrum.hpp"

namespace qpamp {

/// Parse error carrying the 1-based line of the offending input.
class ConfigError : public InvalidParameter {
public:
    ConfigError(std::size_t line, const std::string& what);
    std::size_t line;
};

struct AnalysisSettings {
    Window window{Window::rect};
    int k_max{30};
    int l_max{3};
    double tol_match_bins{3.0};   // matching tolerance in units of the spectral bin spacing
    double rel_threshold{kDefaultRelThreshold};
    double min_prominence{kDefaultMinProminence};
};

/// A frequency given either as a number or as "c*omegaN" / "omegaN", resolved
/// against the transition frequencies at the configured delta and g.
struct FrequencySpec {
    double scale{1.0};
    int transition{0};   // 0 = absolute value in `scale`

    static FrequencySpec parse(std::string_view text);
    [[nodiscard]] double resolve(const TransitionFrequencies& tf) const;
    [[nodiscard]] std::string to_string() const;
};

struct ScenarioConfig {
    std::string name{"custom"};
    QubitPairParams params;
    DriveParams drive;
    IntegratorConfig integrator;
    AnalysisSettings analysis;
    FrequencySpec omega_pump_spec;
    FrequencySpec omega_weak_spec;
    std::optional<std::filesystem::path> out_dir;
    bool emit_csv{true};
    bool emit_svg{true};
    bool dt_check{true};
    bool sample_stride_explicit{false};

    /// The identical-qubit tunneling amplitude, the unit of every reported frequency.
    [[nodiscard]] double delta() const { return params.delta1; }
    [[nodiscard]] TransitionFrequencies transitions() const;
    /// Recomputes the drive frequencies from their specs.
    void resolve_frequencies();
    /// Re-derives dt-dependent defaults (sample stride keeps the 0.1 sampling interval).
    void set_dt(double dt);
    void validate() const;
    /// Same config with the weak signal switched off.
    [[nodiscard]] ScenarioConfig pump_only() const;
    /// Same config with the step halved, the sampling grid unchanged and the
    /// noise path refined rather than redrawn.
    [[nodiscard]] ScenarioConfig halved_dt() const;
    /// Canonical key = value rendering (round-trips through parse_config).
    [[nodiscard]] std::string to_text() const;
};

inline constexpr double kDefaultSampleInterval = 0.1;

/// Parses the documented key = value format. Keys: delta, g, gamma_phi, gamma_r,
/// zt, amp_pump, omega_pump, amp_weak, omega_weak, noise_d, dt, t_total,
/// t_transient, sample_stride, method, seed, realizations, window, k_max,
/// l_max, tol_match. '#' starts a comment. Unknown or repeated keys are rejected.
ScenarioConfig parse_config(std::string_view text);

ScenarioConfig load_config(const std::filesystem::path& path);

/// Built-in scenarios reproducing the reference figures.
std::vector<std::string> preset_names();
std::optional<std::string> preset_text(std::string_view name);
ScenarioConfig preset(std::string_view name);

}  // namespace qpamp
