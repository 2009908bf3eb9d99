#include "qpamp/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

namespace qpamp {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Pairwise sum keeps the ensemble mean independent of accumulation order.
double pairwise_sum(std::span<const Spectrum> spectra, std::size_t bin) {
    if (spectra.size() == 1) return spectra[0].magnitude[bin];
    const std::size_t half = spectra.size() / 2;
    return pairwise_sum(spectra.first(half), bin) + pairwise_sum(spectra.subspan(half), bin);
}

}  // namespace

std::string_view to_string(Window w) {
    return w == Window::rect ? "rect" : "hann";
}

Window window_from_string(std::string_view s) {
    if (s == "rect") return Window::rect;
    if (s == "hann") return Window::hann;
    throw InvalidParameter("unknown window '" + std::string(s) + "' (expected rect or hann)");
}

Spectrum amplitude_spectrum(std::span<const double> values, double sample_interval, Window window) {
    const std::size_t n = values.size();
    if (n < kMinSpectrumSamples)
        throw InvalidParameter("spectrum needs at least " + std::to_string(kMinSpectrumSamples)
                               + " samples, got " + std::to_string(n));
    if (!(sample_interval > 0)) throw InvalidParameter("sample interval must be positive");

    double mean = 0.0;
    for (double x : values) mean += x;
    mean /= static_cast<double>(n);

    double* in = fftw_alloc_real(n);
    auto* out = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n / 2 + 1));
    double coherent = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        if (window == Window::hann)
            w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
        coherent += w;
        in[i] = w * (values[i] - mean);
    }

    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, reinterpret_cast<fftw_complex*>(out),
                                    FFTW_ESTIMATE);
    }
    fftw_execute(plan);

    Spectrum spec;
    spec.window = window;
    spec.n_samples = n;
    spec.t_analysis = static_cast<double>(n) * sample_interval;
    const double dw = 2.0 * std::numbers::pi / spec.t_analysis;
    spec.omega.resize(n / 2 + 1);
    spec.magnitude.resize(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        spec.omega[k] = static_cast<double>(k) * dw;
        spec.magnitude[k] = std::abs(out[k]) / coherent;
    }

    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(reinterpret_cast<fftw_complex*>(out));
    return spec;
}

Spectrum compute_spectrum(const TimeSeries& ts, std::string_view channel, double transient, Window window) {
    const auto& values = ts.channel(channel);
    if (!(transient >= 0)) throw InvalidParameter("transient must be >= 0");
    const auto first = std::lower_bound(ts.t.begin(), ts.t.end(), transient);
    const auto offset = static_cast<std::size_t>(first - ts.t.begin());
    if (offset >= ts.size()) throw InvalidParameter("transient exceeds the span of the time series");

    Spectrum spec = amplitude_spectrum(std::span(values).subspan(offset), ts.sample_interval, window);
    spec.channel = std::string(channel);
    spec.transient = transient;
    return spec;
}

Spectrum ensemble_spectrum(std::span<const Spectrum> spectra) {
    if (spectra.empty()) throw InvalidParameter("ensemble of zero spectra");
    const Spectrum& ref = spectra.front();
    for (const auto& s : spectra) {
        if (s.window != ref.window || s.omega != ref.omega)
            throw InvalidParameter("ensemble members must share the frequency grid and window");
    }
    Spectrum out = ref;
    const double n = static_cast<double>(spectra.size());
    for (std::size_t k = 0; k < out.size(); ++k) out.magnitude[k] = pairwise_sum(spectra, k) / n;
    out.realizations = 0;
    for (const auto& s : spectra) out.realizations += s.realizations;
    return out;
}

RefinedPeak refine_peak(const Spectrum& spec, std::size_t bin) {
    const auto& m = spec.magnitude;
    if (bin == 0 || bin + 1 >= m.size()) return {spec.omega[bin], m[bin]};
    const double a = m[bin - 1], b = m[bin], c = m[bin + 1];
    const double denom = a - 2.0 * b + c;
    if (denom >= 0.0) return {spec.omega[bin], b};
    const double p = 0.5 * (a - c) / denom;
    return {spec.omega[bin] + p * spec.bin_spacing(), b - 0.25 * (a - c) * p};
}

PeakSet find_peaks(const Spectrum& spec, double rel_threshold, double min_prominence) {
    if (spec.size() < 3) throw InvalidParameter("cannot search an empty spectrum for peaks");
    if (!(rel_threshold > 0 && rel_threshold < 1))
        throw InvalidParameter("rel_threshold must lie in (0, 1)");
    if (!(min_prominence >= 0)) throw InvalidParameter("min_prominence must be >= 0");

    const auto& m = spec.magnitude;
    const double top = *std::max_element(m.begin(), m.end());
    PeakSet peaks;
    if (!(top > 0)) return peaks;
    const double floor_h = rel_threshold * top;
    const double floor_p = min_prominence * top;

    for (std::size_t i = 1; i + 1 < m.size(); ++i) {
        if (!(m[i] > m[i - 1] && m[i] >= m[i + 1] && m[i] >= floor_h)) continue;

        double left_min = m[i];
        for (std::size_t j = i; j-- > 0;) {
            if (m[j] > m[i]) break;
            left_min = std::min(left_min, m[j]);
        }
        double right_min = m[i];
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            if (m[j] > m[i]) break;
            right_min = std::min(right_min, m[j]);
        }
        if (m[i] - std::max(left_min, right_min) < floor_p) continue;

        const auto r = refine_peak(spec, i);
        peaks.push_back({r.omega, r.height, i, std::nullopt, 0.0});
    }
    return peaks;
}

double min_combination_spacing(double omega_pump, double omega_weak, int k_max, int l_max) {
    std::vector<double> freqs;
    for (int l = -l_max; l <= l_max; ++l)
        for (int k = -k_max; k <= k_max; ++k) {
            const double f = k * omega_pump + l * omega_weak;
            if (f > 0) freqs.push_back(f);
        }
    std::sort(freqs.begin(), freqs.end());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < freqs.size(); ++i) {
        const double gap = freqs[i] - freqs[i - 1];
        // exact degeneracies (commensurate tones) name the same line
        if (gap > 1e-12 * std::max(1.0, freqs[i])) best = std::min(best, gap);
    }
    return best;
}

PeakSet classify_peaks(PeakSet peaks, double omega_pump, double omega_weak, int k_max, int l_max,
                       double tol_match) {
    if (!(omega_pump > 0)) throw InvalidParameter("omega_pump must be > 0");
    if (l_max > 0 && !(omega_weak > 0)) throw InvalidParameter("omega_weak must be > 0");
    if (k_max < 0 || l_max < 0) throw InvalidParameter("k_max and l_max must be >= 0");
    if (!(tol_match > 0)) throw InvalidParameter("tol_match must be positive");
    const double spacing = min_combination_spacing(omega_pump, omega_weak, k_max, l_max);
    if (!(tol_match < 0.5 * spacing))
        throw InvalidParameter("tol_match must be below half the smallest combination spacing ("
                               + std::to_string(0.5 * spacing) + ")");

    for (Peak& pk : peaks) {
        double best_res = std::numeric_limits<double>::infinity();
        Combination best{0, 0};
        for (int l = -l_max; l <= l_max; ++l)
            for (int k = -k_max; k <= k_max; ++k) {
                const double f = k * omega_pump + l * omega_weak;
                if (!(f > 0)) continue;
                const double res = std::abs(pk.omega - f);
                const double eps = 1e-12 * std::max(1.0, f);
                bool better = res < best_res - eps;
                if (!better && std::abs(res - best_res) <= eps) {
                    better = std::abs(l) < std::abs(best.l)
                          || (std::abs(l) == std::abs(best.l) && std::abs(k) < std::abs(best.k));
                }
                if (better) {
                    best_res = res;
                    best = {k, l};
                }
            }
        pk.residual = best_res;
        pk.label = best_res <= tol_match ? std::optional(best) : std::nullopt;
    }
    return peaks;
}

double height_near(const Spectrum& spec, double omega, double tol) {
    const double dw = spec.bin_spacing();
    if (!(dw > 0)) return 0.0;
    const auto lo = static_cast<std::ptrdiff_t>(std::floor((omega - tol) / dw));
    const auto hi = static_cast<std::ptrdiff_t>(std::ceil((omega + tol) / dw));
    double best = 0.0;
    const auto& m = spec.magnitude;
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(lo, 1);
         i <= std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(m.size()) - 2); ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (m[u] > m[u - 1] && m[u] >= m[u + 1]) best = std::max(best, refine_peak(spec, u).height);
    }
    return best;
}

AmplificationMetrics amplification_metrics(const PeakSet& mixed, const Spectrum& mixed_spec,
                                           const PeakSet& pump_only, double omega_pump,
                                           double omega_weak, double tol_match) {
    AmplificationMetrics m;
    for (const Peak& p : pump_only) m.i_a = std::max(m.i_a, p.height);
    for (const Peak& p : mixed) {
        if (p.is_mixed() && p.height > m.i_eps) {
            m.i_eps = p.height;
            m.i_eps_label = p.label;
            m.i_eps_omega = p.omega;
        }
    }
    m.no_mixed_peaks = !m.i_eps_label.has_value();
    m.ratio = m.i_a > 0 ? m.i_eps / m.i_a : 0.0;
    if (omega_weak > 0) {
        m.i_pm = height_near(mixed_spec, omega_weak + omega_pump, tol_match);
        if (omega_weak - omega_pump > 0)
            m.i_pm = std::max(m.i_pm, height_near(mixed_spec, omega_weak - omega_pump, tol_match));
    }
    return m;
}

BetaFit beta_from_sweep(std::span<const SweepPoint> points, double amp_pump) {
    if (!(amp_pump > 0)) throw InvalidParameter("beta fit needs a positive pump amplitude");
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    std::size_t used = 0;
    for (const auto& p : points) {
        const double x = p.epsilon / amp_pump;
        if (x < kLinearWindow) {
            sxy += x * p.output;
            sxx += x * x;
            syy += p.output * p.output;
            ++used;
        }
    }
    if (used < 3 || !(sxx > 0))
        throw InvalidParameter("beta fit needs at least 3 points with eps/A < 0.005, got "
                               + std::to_string(used));

    BetaFit fit;
    fit.beta = sxy / sxx;
    fit.n_used = used;
    double ss_res = 0.0;
    for (const auto& p : points) {
        const double x = p.epsilon / amp_pump;
        if (x < kLinearWindow) {
            const double r = p.output - fit.beta * x;
            fit.residuals.push_back(r);
            ss_res += r * r;
        }
    }
    // uncentred R^2, consistent with a fit through the origin
    fit.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;

    std::vector<SweepPoint> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const SweepPoint& a, const SweepPoint& b) { return a.epsilon < b.epsilon; });
    for (const auto& p : sorted) {
        if (p.output < 0.8 * fit.beta * p.epsilon / amp_pump) {
            fit.saturation_onset = p.epsilon;
            break;
        }
    }
    return fit;
}

}  // namespace qpamp
