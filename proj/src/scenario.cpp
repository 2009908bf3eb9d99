#include "qpamp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "qpamp/emit.hpp"
#include "qpamp/parallel.hpp"

namespace qpamp {

namespace {

struct RealizationOutput {
    std::optional<TimeSeries> trajectory;
    Spectrum spec_z;
    Spectrum spec_x;
    std::size_t physicality_failures;
};

nlohmann::json label_json(const std::optional<Combination>& c) {
    if (!c) return nullptr;
    return nlohmann::json{{"k", c->k}, {"l", c->l}};
}

nlohmann::json headline_json(const Headline& h) {
    return {{"max_height", h.max_height}, {"I_A", h.i_a}, {"I_eps", h.i_eps}, {"ratio", h.ratio}, {"I_pm", h.i_pm}};
}

nlohmann::json peaks_json(const PeakSet& peaks, double delta, std::size_t limit) {
    std::vector<const Peak*> sorted;
    for (const auto& p : peaks) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [](const Peak* a, const Peak* b) { return a->height > b->height; });
    if (sorted.size() > limit) sorted.resize(limit);
    nlohmann::json arr = nlohmann::json::array();
    for (const Peak* p : sorted)
        arr.push_back({{"omega", p->omega / delta}, {"height", p->height}, {"label", label_json(p->label)}});
    return arr;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

void emit_artifacts(ScenarioResult& r) {
    const auto& cfg = r.config;
    const auto dir = *cfg.out_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const double delta = cfg.delta();
    const auto& a = r.analysis;

    if (cfg.emit_csv) {
        write_timeseries_csv(dir / "timeseries.csv", a.trajectory, delta);
        write_spectrum_csv(dir / "spectrum_Z1.csv", a.spec_z, delta);
        write_spectrum_csv(dir / "spectrum_X1.csv", a.spec_x, delta);
        write_peaks_csv(dir / "peaks_Z1.csv", a.peaks_z, delta);
        write_peaks_csv(dir / "peaks_X1.csv", a.peaks_x, delta);
        r.written.insert(r.written.end(), {dir / "timeseries.csv", dir / "spectrum_Z1.csv", dir / "spectrum_X1.csv",
                                           dir / "peaks_Z1.csv", dir / "peaks_X1.csv"});
        if (r.pump_only) {
            write_spectrum_csv(dir / "spectrum_Z1_pump_only.csv", r.pump_only->spec_z, delta);
            write_peaks_csv(dir / "peaks_Z1_pump_only.csv", r.pump_only->peaks_z, delta);
            r.written.insert(r.written.end(), {dir / "spectrum_Z1_pump_only.csv", dir / "peaks_Z1_pump_only.csv"});
        }
    }
    if (cfg.emit_svg) {
        write_spectrum_svg(dir / "spectrum_Z1.svg", a.spec_z, a.peaks_z, cfg.name + ": S_Z", delta);
        write_spectrum_svg(dir / "spectrum_X1.svg", a.spec_x, a.peaks_x, cfg.name + ": S_X", delta);
        const double t0 = cfg.integrator.t_transient;
        write_trajectory_svg(dir / "trajectory_Z1.svg", a.trajectory, "Z1", cfg.name + ": Z1(t)", t0, t0 + 100.0,
                             delta);
        r.written.insert(r.written.end(),
                         {dir / "spectrum_Z1.svg", dir / "spectrum_X1.svg", dir / "trajectory_Z1.svg"});
    }

    const auto tf = cfg.transitions();
    const auto& m = r.metrics;
    nlohmann::json j;
    j["scenario"] = cfg.name;
    j["config"] = cfg.to_text();
    j["transition_frequencies"] = {tf.omega1 / delta, tf.omega2 / delta, tf.omega3 / delta, tf.omega4 / delta};
    j["omega_pump"] = cfg.drive.omega_pump / delta;
    j["omega_weak"] = cfg.drive.omega_weak / delta;
    j["realizations"] = cfg.integrator.n_realizations;
    j["window"] = std::string(to_string(cfg.analysis.window));
    j["analysis"] = {{"transient", a.spec_z.transient},
                     {"t_analysis", a.spec_z.t_analysis},
                     {"n_samples", a.spec_z.n_samples},
                     {"bin_spacing", a.spec_z.bin_spacing() / delta}};
    j["metrics"] = {{"I_eps", m.i_eps},
                    {"I_A", m.i_a},
                    {"ratio", m.ratio},
                    {"I_pm", m.i_pm},
                    {"I_eps_label", label_json(m.i_eps_label)},
                    {"I_eps_omega", m.i_eps_omega / delta},
                    {"no_mixed_peaks", m.no_mixed_peaks}};
    if (cfg.drive.amp_pump > 0 && cfg.drive.amp_weak > 0)
        j["metrics"]["single_point_gain"] = m.ratio / (cfg.drive.amp_weak / cfg.drive.amp_pump);
    j["headline"] = headline_json(r.headline);
    if (r.convergence) {
        j["dt_check"] = {{"verdict", r.convergence->pass ? "pass" : "fail"},
                         {"max_relative_change", r.convergence->max_rel_change},
                         {"tolerance", kConvergenceTolerance},
                         {"dt", cfg.integrator.dt},
                         {"fine", headline_json(r.convergence->fine)}};
    } else {
        j["dt_check"] = {{"verdict", "skipped"}};
    }
    j["physicality_failures"] = a.physicality_failures;
    j["top_peaks_Z1"] = peaks_json(a.peaks_z, delta, 40);
    j["top_peaks_X1"] = peaks_json(a.peaks_x, delta, 40);
    write_text(dir / "summary.json", j.dump(2) + "\n");
    r.written.push_back(dir / "summary.json");
}

}  // namespace

double tolerance(const ScenarioConfig& cfg, double bin) {
    return cfg.analysis.tol_match_bins * bin;
}

PeakSet detect_peaks(const Spectrum& spec, const ScenarioConfig& cfg) {
    PeakSet peaks = find_peaks(spec, cfg.analysis.rel_threshold, cfg.analysis.min_prominence);
    const double wp = cfg.drive.omega_pump;
    const double ww = cfg.drive.omega_weak;
    if (!(wp > 0)) return peaks;
    const int l_max = ww > 0 ? cfg.analysis.l_max : 0;
    return classify_peaks(std::move(peaks), wp, ww, cfg.analysis.k_max, l_max, tolerance(cfg, spec.bin_spacing()));
}

Analysis analyze(const ScenarioConfig& cfg, bool keep_trajectory) {
    cfg.validate();
    IntegratorConfig ic = cfg.integrator;
    for (Component c : {P0z, P0x})
        if (std::find(ic.channels.begin(), ic.channels.end(), c) == ic.channels.end()) ic.channels.push_back(c);
    const BlochTensor initial = thermal_product_state(cfg.params);
    const double transient = ic.t_transient;
    const Window window = cfg.analysis.window;

    auto outputs = parallel_map(ic.n_realizations, [&](std::size_t r) {
        TimeSeries ts = integrate(cfg.params, cfg.drive, ic, initial, r);
        RealizationOutput out{std::nullopt, compute_spectrum(ts, "Z1", transient, window),
                              compute_spectrum(ts, "X1", transient, window), ts.meta.physicality_failures};
        if (r == 0 && keep_trajectory) out.trajectory = std::move(ts);
        return out;
    });

    Analysis a;
    std::vector<Spectrum> zs, xs;
    for (auto& o : outputs) {
        zs.push_back(std::move(o.spec_z));
        xs.push_back(std::move(o.spec_x));
        a.physicality_failures += o.physicality_failures;
        if (o.trajectory) a.trajectory = std::move(*o.trajectory);
    }
    a.spec_z = ensemble_spectrum(zs);
    a.spec_x = ensemble_spectrum(xs);
    a.peaks_z = detect_peaks(a.spec_z, cfg);
    a.peaks_x = detect_peaks(a.spec_x, cfg);
    return a;
}

Headline headline_of(const ScenarioConfig&, const Analysis& a, const AmplificationMetrics& m) {
    Headline h;
    for (const auto& p : a.peaks_z) h.max_height = std::max(h.max_height, p.height);
    h.i_a = m.i_a;
    h.i_eps = m.i_eps;
    h.ratio = m.ratio;
    h.i_pm = m.i_pm;
    return h;
}

double max_relative_change(const Headline& a, const Headline& b) {
    const std::array<std::pair<double, double>, 5> pairs = {
        std::pair{a.max_height, b.max_height}, {a.i_a, b.i_a}, {a.i_eps, b.i_eps}, {a.ratio, b.ratio}, {a.i_pm, b.i_pm}};
    double worst = 0.0;
    for (const auto& [x, y] : pairs) {
        if (x == 0.0 && y == 0.0) continue;
        const double ref = std::abs(x);
        worst = std::max(worst, ref > 0 ? std::abs(y - x) / ref : std::numeric_limits<double>::infinity());
    }
    return worst;
}

namespace {

struct Evaluated {
    Analysis analysis;
    std::optional<Analysis> pump_only;
    AmplificationMetrics metrics;
    Headline headline;
};

Evaluated evaluate(const ScenarioConfig& cfg, bool keep_trajectory) {
    Evaluated e;
    e.analysis = analyze(cfg, keep_trajectory);
    const PeakSet* reference = &e.analysis.peaks_z;
    if (cfg.drive.amp_weak > 0 && cfg.drive.amp_pump > 0) {
        e.pump_only = analyze(cfg.pump_only(), false);
        reference = &e.pump_only->peaks_z;
    }
    e.metrics = amplification_metrics(e.analysis.peaks_z, e.analysis.spec_z, *reference, cfg.drive.omega_pump,
                                      cfg.drive.omega_weak, tolerance(cfg, e.analysis.spec_z.bin_spacing()));
    e.headline = headline_of(cfg, e.analysis, e.metrics);
    return e;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    ScenarioResult r;
    r.config = cfg;
    Evaluated e = evaluate(cfg, true);
    r.analysis = std::move(e.analysis);
    r.pump_only = std::move(e.pump_only);
    r.metrics = e.metrics;
    r.headline = e.headline;

    if (cfg.dt_check) {
        const Evaluated fine = evaluate(cfg.halved_dt(), false);
        ConvergenceCheck c;
        c.coarse = r.headline;
        c.fine = fine.headline;
        c.max_rel_change = max_relative_change(c.coarse, c.fine);
        c.pass = c.max_rel_change < kConvergenceTolerance;
        r.convergence = c;
    }
    if (cfg.out_dir) emit_artifacts(r);
    return r;
}

SweepAxis sweep_axis_from_string(std::string_view s) {
    if (s == "epsilon") return SweepAxis::epsilon;
    if (s == "D" || s == "noise_d") return SweepAxis::noise_d;
    if (s == "omega_weak") return SweepAxis::omega_weak;
    if (s == "g") return SweepAxis::g;
    throw InvalidParameter("unknown sweep axis '" + std::string(s) + "' (expected epsilon, D, omega_weak or g)");
}

std::string_view to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::epsilon: return "epsilon";
        case SweepAxis::noise_d: return "D";
        case SweepAxis::omega_weak: return "omega_weak";
        case SweepAxis::g: return "g";
    }
    return "?";
}

ScenarioConfig with_axis_value(const ScenarioConfig& base, SweepAxis axis, double value) {
    ScenarioConfig c = base;
    switch (axis) {
        case SweepAxis::epsilon: c.drive.amp_weak = value; break;
        case SweepAxis::noise_d:
            c.drive.noise_d = value;
            if (value > 0 && c.integrator.method == Method::rk4) c.integrator.method = Method::rk4_em;
            break;
        case SweepAxis::omega_weak: c.omega_weak_spec = FrequencySpec{value, 0}; break;
        case SweepAxis::g: c.params.g = value; break;
    }
    c.resolve_frequencies();
    c.validate();
    return c;
}

SweepResult run_sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values) {
    if (values.empty()) throw InvalidParameter("sweep needs at least one value");
    SweepResult result;
    result.axis = axis;
    result.rows.resize(values.size());

    std::vector<std::optional<ScenarioConfig>> configs(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        result.rows[i].value = values[i];
        try {
            configs[i] = with_axis_value(base, axis, values[i]);
        } catch (const std::exception& ex) {
            result.rows[i].status = ex.what();
        }
    }

    // pump-only companions shared between points (all of them on the epsilon axis)
    std::map<std::string, std::size_t> companion_index;
    std::vector<ScenarioConfig> companions;
    for (const auto& c : configs) {
        if (!c || !(c->drive.amp_pump > 0)) continue;
        const ScenarioConfig po = c->pump_only();
        if (companion_index.emplace(po.to_text(), companions.size()).second) companions.push_back(po);
    }

    struct Outcome {
        std::optional<Analysis> analysis;
        std::string error;
    };
    auto guarded = [](const ScenarioConfig& c) {
        Outcome o;
        try {
            o.analysis = analyze(c, false);
        } catch (const std::exception& ex) {
            o.error = ex.what();
        }
        return o;
    };
    auto companion_runs = parallel_map(companions.size(), [&](std::size_t i) { return guarded(companions[i]); });

    auto point_runs = parallel_map(values.size(), [&](std::size_t i) {
        const auto& c = configs[i];
        if (!c || (c->drive.amp_weak == 0 && c->drive.amp_pump > 0)) return Outcome{};
        return guarded(*c);
    });

    for (std::size_t i = 0; i < values.size(); ++i) {
        auto& row = result.rows[i];
        if (!configs[i]) continue;
        const auto& c = *configs[i];
        const Outcome* ref = nullptr;
        if (c.drive.amp_pump > 0) ref = &companion_runs[companion_index.at(c.pump_only().to_text())];
        const Outcome* own = point_runs[i].analysis || !point_runs[i].error.empty() ? &point_runs[i] : ref;
        if (!own || !own->analysis) {
            row.status = own ? own->error : "no analysis";
            continue;
        }
        if (ref && !ref->analysis) {
            row.status = "pump-only reference failed: " + ref->error;
            continue;
        }
        const Analysis& a = *own->analysis;
        const PeakSet& ref_peaks = ref ? ref->analysis->peaks_z : a.peaks_z;
        row.metrics = amplification_metrics(a.peaks_z, a.spec_z, ref_peaks, c.drive.omega_pump, c.drive.omega_weak,
                                            tolerance(c, a.spec_z.bin_spacing()));
    }

    if (axis == SweepAxis::epsilon) {
        std::vector<SweepPoint> pts;
        for (const auto& row : result.rows)
            if (row.status == "ok") pts.push_back({row.value, row.metrics.ratio});
        try {
            result.beta = beta_from_sweep(pts, base.drive.amp_pump);
        } catch (const std::exception& ex) {
            result.beta_error = ex.what();
        }
    }

    if (base.out_dir) {
        const auto dir = *base.out_dir;
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
        const auto csv = dir / ("sweep_" + std::string(to_string(axis)) + ".csv");
        std::ofstream out(csv, std::ios::binary);
        if (!out) throw IoError("cannot open " + csv.string() + " for writing");
        out << to_string(axis) << ",I_eps [dimensionless],I_A [dimensionless],ratio [dimensionless],"
            << "I_pm [dimensionless],k,l,status\n";
        for (const auto& row : result.rows) {
            const auto& m = row.metrics;
            out << format_number(row.value) << ',' << format_number(m.i_eps) << ',' << format_number(m.i_a) << ','
                << format_number(m.ratio) << ',' << format_number(m.i_pm) << ',';
            if (m.i_eps_label) out << m.i_eps_label->k << ',' << m.i_eps_label->l;
            else out << ',';
            std::string status = row.status;
            std::replace(status.begin(), status.end(), ',', ';');
            out << ',' << status << '\n';
        }
        if (!out) throw IoError("write failed for " + csv.string());
        result.written.push_back(csv);

        nlohmann::json j;
        j["axis"] = std::string(to_string(axis));
        j["base_config"] = base.to_text();
        if (result.beta) {
            j["beta"] = {{"beta", result.beta->beta},
                         {"points_used", result.beta->n_used},
                         {"r_squared", result.beta->r_squared},
                         {"residuals", result.beta->residuals},
                         {"saturation_onset", result.beta->saturation_onset ? nlohmann::json(*result.beta->saturation_onset)
                                                                            : nlohmann::json(nullptr)}};
        } else if (result.beta_error) {
            j["beta"] = {{"error", *result.beta_error}};
        }
        write_text(dir / "sweep_summary.json", j.dump(2) + "\n");
        result.written.push_back(dir / "sweep_summary.json");
    }
    return result;
}

}  // namespace qpamp
