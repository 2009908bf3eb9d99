// spectrum.hpp: magnitude spectra, peak detection and combination-frequency analysis

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qpamp/integrate.hpp"

namespace qpamp {

enum class Window { rect, hann };

std::string_view to_string(Window w);
Window window_from_string(std::string_view s);

/// One-sided amplitude spectrum on the grid omega_k = k * 2 pi / T_analysis,
/// k = 0 .. floor(n/2). A unit-amplitude sinusoid centred on a bin has height 1/2.
struct Spectrum {
    std::vector<double> omega;
    std::vector<double> magnitude;
    Window window{Window::rect};
    std::string channel;
    double transient{0.0};
    double t_analysis{0.0};
    std::size_t n_samples{0};
    std::size_t realizations{1};

    [[nodiscard]] std::size_t size() const { return omega.size(); }
    [[nodiscard]] double bin_spacing() const { return omega.size() > 1 ? omega[1] - omega[0] : 0.0; }
};

inline constexpr std::size_t kMinSpectrumSamples = 1024;

/// Spectrum of `values` sampled every `sample_interval`. Subtracts the mean,
/// applies the window, normalizes by the window's coherent sum.
Spectrum amplitude_spectrum(std::span<const double> values, double sample_interval, Window window);

/// Spectrum of one channel of a trajectory, ignoring samples with t < transient.
Spectrum compute_spectrum(const TimeSeries& ts, std::string_view channel, double transient, Window window);

/// Pointwise mean of magnitudes (average of moduli). Grids and windows must match.
Spectrum ensemble_spectrum(std::span<const Spectrum> spectra);

struct Combination {
    int k;   // multiple of the pump frequency
    int l;   // multiple of the weak-signal frequency
    friend bool operator==(const Combination&, const Combination&) = default;
};

struct Peak {
    double omega;
    double height;
    std::size_t bin;
    std::optional<Combination> label;
    double residual{0.0};

    [[nodiscard]] bool is_mixed() const { return label && label->l != 0; }
    friend bool operator==(const Peak&, const Peak&) = default;
};

/// Peaks sorted by frequency.
using PeakSet = std::vector<Peak>;

/// Vertex of the parabola through bins i-1, i, i+1 (frequency, height).
struct RefinedPeak {
    double omega;
    double height;
};
RefinedPeak refine_peak(const Spectrum& spec, std::size_t bin);

/// Local maxima with height >= rel_threshold * max and prominence >= min_prominence * max.
PeakSet find_peaks(const Spectrum& spec, double rel_threshold, double min_prominence);

inline constexpr double kDefaultRelThreshold = 0.01;
inline constexpr double kDefaultMinProminence = 0.005;

/// Smallest spacing between distinct positive frequencies k w_p + l w_w, |k| <= k_max, |l| <= l_max.
double min_combination_spacing(double omega_pump, double omega_weak, int k_max, int l_max);

/// Label each peak with the (k, l) minimizing |omega - (k w_p + l w_w)| over
/// |k| <= k_max, |l| <= l_max, k w_p + l w_w > 0. Ties go to smaller |l|, then
/// smaller |k|. Peaks farther than tol_match from every combination stay unlabeled.
PeakSet classify_peaks(PeakSet peaks, double omega_pump, double omega_weak, int k_max, int l_max,
                       double tol_match);

/// Largest refined height within +-tol of `omega`, or 0 if no local maximum lies there.
double height_near(const Spectrum& spec, double omega, double tol);

struct AmplificationMetrics {
    double i_eps{0.0};    // highest mixed (l != 0) peak of the driven spectrum
    double i_a{0.0};      // highest peak of the pump-only spectrum
    double ratio{0.0};    // i_eps / i_a
    double i_pm{0.0};     // max over the (1, 1) and (-1, 1) lines
    std::optional<Combination> i_eps_label;
    double i_eps_omega{0.0};
    bool no_mixed_peaks{true};
};

/// `mixed` and `pump_only` must be labeled peak sets from spectra that differ
/// only in the weak-signal amplitude; `mixed_spec` is used to read the (+-1, 1) lines.
AmplificationMetrics amplification_metrics(const PeakSet& mixed, const Spectrum& mixed_spec,
                                           const PeakSet& pump_only, double omega_pump,
                                           double omega_weak, double tol_match);

/// Normalized output of a sweep point: epsilon and I_eps / I_A.
struct SweepPoint {
    double epsilon;
    double output;
};

struct BetaFit {
    double beta{0.0};
    std::size_t n_used{0};
    std::vector<double> residuals;             // output - beta * eps/A for points in the window
    std::optional<double> saturation_onset;    // first eps more than 20% below the line
    double r_squared{0.0};
};

inline constexpr double kLinearWindow = 0.005;   // eps / A upper limit of the linear regime

/// Slope through the origin of output vs eps/A over points with eps/A < 0.005.
BetaFit beta_from_sweep(std::span<const SweepPoint> points, double amp_pump);

}  // namespace qpamp
