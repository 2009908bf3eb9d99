// qpamp: command-line front end: scenarios, sweeps, spectra of saved trajectories

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpamp/config.hpp"
#include "qpamp/emit.hpp"
#include "qpamp/scenario.hpp"

namespace {

using namespace qpamp;

constexpr int kExitValidation = 1;
constexpr int kExitDivergence = 2;

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> dt;
    std::optional<double> t_total;
    std::optional<double> t_transient;
    std::optional<std::size_t> realizations;
    bool no_svg{false};
    bool no_dt_check{false};
};

ScenarioConfig resolve_scenario(const std::string& ref) {
    if (preset_text(ref)) return preset(ref);
    if (std::filesystem::exists(ref)) return load_config(ref);
    throw InvalidParameter("'" + ref + "' is neither a preset nor a readable config file");
}

void apply(const GlobalOptions& g, ScenarioConfig& cfg) {
    if (g.seed) cfg.integrator.seed = *g.seed;
    if (g.dt) cfg.set_dt(*g.dt);
    if (g.t_total) cfg.integrator.t_total = *g.t_total;
    if (g.t_transient) cfg.integrator.t_transient = *g.t_transient;
    if (g.realizations) cfg.integrator.n_realizations = *g.realizations;
    if (g.out) cfg.out_dir = std::filesystem::path(*g.out);
    cfg.emit_svg = !g.no_svg;
    cfg.dt_check = !g.no_dt_check;
    cfg.validate();
}

std::string label(const std::optional<Combination>& c) {
    return c ? "(" + std::to_string(c->k) + ", " + std::to_string(c->l) + ")" : "-";
}

void print_metrics(const AmplificationMetrics& m) {
    std::cout << "  I_A   = " << format_number(m.i_a) << "\n"
              << "  I_eps = " << format_number(m.i_eps) << "  at " << label(m.i_eps_label)
              << (m.no_mixed_peaks ? "  [no mixed peaks]" : "") << "\n"
              << "  ratio = " << format_number(m.ratio) << "\n"
              << "  I_pm  = " << format_number(m.i_pm) << "\n";
}

int cmd_scenario(const GlobalOptions& g, const std::string& ref) {
    ScenarioConfig cfg = resolve_scenario(ref);
    apply(g, cfg);
    const auto r = run_scenario(cfg);
    const double delta = cfg.delta();
    std::cout << "scenario " << cfg.name << ": omega_pump = " << format_number(cfg.drive.omega_pump / delta)
              << ", omega_weak = " << format_number(cfg.drive.omega_weak / delta) << "\n";
    print_metrics(r.metrics);
    std::cout << "  Z1 peaks: " << r.analysis.peaks_z.size() << ", X1 peaks: " << r.analysis.peaks_x.size() << "\n";
    if (r.convergence)
        std::cout << "  dt/2 check: " << (r.convergence->pass ? "pass" : "FAIL") << " (max relative change "
                  << format_number(r.convergence->max_rel_change) << ")\n";
    if (r.analysis.physicality_failures > 0)
        std::cout << "  physicality warnings: " << r.analysis.physicality_failures << "\n";
    for (const auto& p : r.written) std::cout << "  wrote " << p.string() << "\n";
    return 0;
}

int cmd_sweep(const GlobalOptions& g, const std::string& ref, const std::string& axis_name,
              const std::vector<double>& values, bool relative) {
    ScenarioConfig cfg = resolve_scenario(ref);
    apply(g, cfg);
    const SweepAxis axis = sweep_axis_from_string(axis_name);
    std::vector<double> vals = values;
    if (relative) {
        if (axis != SweepAxis::epsilon) throw InvalidParameter("--relative applies to the epsilon axis only");
        for (double& v : vals) v *= cfg.drive.amp_pump;
    }
    const auto r = run_sweep(cfg, axis, vals);
    std::cout << to_string(axis) << ",I_eps,I_A,ratio,I_pm,label,status\n";
    for (const auto& row : r.rows)
        std::cout << format_number(row.value) << ',' << format_number(row.metrics.i_eps) << ','
                  << format_number(row.metrics.i_a) << ',' << format_number(row.metrics.ratio) << ','
                  << format_number(row.metrics.i_pm) << ',' << label(row.metrics.i_eps_label) << ',' << row.status
                  << "\n";
    if (r.beta) {
        std::cout << "beta = " << format_number(r.beta->beta) << " from " << r.beta->n_used << " points";
        if (r.beta->saturation_onset) std::cout << ", saturation onset at eps = " << format_number(*r.beta->saturation_onset);
        std::cout << "\n";
    } else if (r.beta_error) {
        std::cout << "beta fit unavailable: " << *r.beta_error << "\n";
    }
    for (const auto& p : r.written) std::cout << "wrote " << p.string() << "\n";
    bool all_ok = true;
    for (const auto& row : r.rows) all_ok = all_ok && row.status == "ok";
    return all_ok ? 0 : kExitValidation;
}

int cmd_spectrum(const GlobalOptions& g, const std::string& csv, const std::string& channel, double transient,
                 const std::string& window_name, double rel_threshold) {
    const TimeSeries ts = read_timeseries_csv(csv);
    const Spectrum spec = compute_spectrum(ts, channel, transient, window_from_string(window_name));
    const PeakSet peaks = find_peaks(spec, rel_threshold, kDefaultMinProminence);
    const std::filesystem::path dir = g.out ? std::filesystem::path(*g.out) : std::filesystem::path(".");
    const auto out_csv = dir / ("spectrum_" + channel + ".csv");
    write_spectrum_csv(out_csv, spec);
    write_peaks_csv(dir / ("peaks_" + channel + ".csv"), peaks);
    std::cout << "wrote " << out_csv.string() << " (" << spec.size() << " bins, " << peaks.size() << " peaks)\n";
    if (!g.no_svg) write_spectrum_svg(dir / ("spectrum_" + channel + ".svg"), spec, peaks, csv + ": " + channel);
    return 0;
}

int cmd_freqs(double delta, double g) {
    const auto tf = transition_frequencies(delta, g);
    std::cout << "omega1 = " << format_number(tf.omega1) << "\n"
              << "omega2 = " << format_number(tf.omega2) << "\n"
              << "omega3 = " << format_number(tf.omega3) << "\n"
              << "omega4 = " << format_number(tf.omega4) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-coupled-qubit parametric amplifier: master-equation simulation and spectral analysis"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--seed", g.seed, "noise seed");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--dt", g.dt, "integration step (1/Delta)");
    app.add_option("--t-total", g.t_total, "simulated time (1/Delta)");
    app.add_option("--t-transient", g.t_transient, "initial span excluded from spectra (1/Delta)");
    app.add_option("--realizations", g.realizations, "noise realizations per ensemble");
    app.add_flag("--no-svg", g.no_svg, "skip SVG plots");
    app.add_flag("--no-dt-check", g.no_dt_check, "skip the dt/2 repetition");

    std::string scenario_ref;
    auto* scenario = app.add_subcommand("scenario", "run a preset or config file");
    scenario->add_option("scenario", scenario_ref, "preset name or config path")->required();

    std::string sweep_ref, axis = "epsilon";
    std::vector<double> values;
    bool relative = false;
    auto* sweep = app.add_subcommand("sweep", "run one scenario per value of a parameter");
    sweep->add_option("scenario", sweep_ref, "preset name or config path")->required();
    sweep->add_option("--axis", axis, "epsilon, D, omega_weak or g");
    sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
    sweep->add_flag("--relative", relative, "epsilon values are given as eps/A");

    std::string csv, channel = "Z1", window = "rect";
    double transient = 5000.0, rel_threshold = kDefaultRelThreshold;
    auto* spectrum = app.add_subcommand("spectrum", "spectrum and peaks of a saved time series");
    spectrum->add_option("timeseries", csv, "CSV written by the scenario command")->required();
    spectrum->add_option("--channel", channel, "column to analyse");
    spectrum->add_option("--transient", transient, "discard samples before this time");
    spectrum->add_option("--window", window, "rect or hann");
    spectrum->add_option("--threshold", rel_threshold, "relative peak threshold");

    double f_delta = 1.0, f_g = 0.0;
    auto* freqs = app.add_subcommand("freqs", "transition frequencies of identical coupled qubits");
    freqs->add_option("delta", f_delta)->required();
    freqs->add_option("g", f_g)->required();

    auto* presets = app.add_subcommand("presets", "list built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*scenario) return cmd_scenario(g, scenario_ref);
        if (*sweep) return cmd_sweep(g, sweep_ref, axis, values, relative);
        if (*spectrum) return cmd_spectrum(g, csv, channel, transient, window, rel_threshold);
        if (*freqs) return cmd_freqs(f_delta, f_g);
        if (*presets) {
            for (const auto& n : preset_names()) std::cout << n << "\n";
            return 0;
        }
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
