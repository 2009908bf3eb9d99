#include "qpamp/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace qpamp {

namespace {

constexpr std::array<std::string_view, 21> kKeys = {
    "delta",   "g",      "gamma_phi",   "gamma_r",       "zt",     "amp_pump",     "omega_pump",
    "amp_weak", "omega_weak", "noise_d", "dt",          "t_total", "t_transient", "sample_stride",
    "method",  "seed",   "realizations", "window",       "k_max",  "l_max",        "tol_match"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view unquote(std::string_view s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

template <class Int>
std::optional<Int> to_integer(std::string_view s) {
    s = trim(s);
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

struct Entry {
    std::string value;
    std::size_t line;
};

[[noreturn]] void key_error(std::string_view key, const std::string& what) {
    throw InvalidParameter(std::string(key) + ": " + what);
}

std::string fmt17(double x) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
    return std::string(buf.data(), ptr);
}

const std::map<std::string, std::string, std::less<>>& presets() {
    static const std::map<std::string, std::string, std::less<>> table = [] {
        const std::string base =
            "delta = 1\n"
            "gamma_phi = 1e-3\n"
            "gamma_r = 1e-3\n"
            "zt = 1\n"
            "omega_pump = omega2\n";
        std::map<std::string, std::string, std::less<>> t;
        // strong pump alone: even harmonics in Z1, odd in X1
        t["pump-only"] = base + "g = 1\namp_pump = 15\namp_weak = 0\nomega_weak = omega3\n";
        // weak signal alone
        t["signal-only"] = base + "g = 1\namp_pump = 0\namp_weak = 0.1\nomega_weak = omega3\n";
        // optimal amplification, eps/A = 1/150
        t["mixed"] = base + "g = 1\namp_pump = 15\namp_weak = 0.1\nomega_weak = omega3\n";
        // sqrt(D)/eps = 0.066 and 0.2
        t["noise-0.066"] = t["mixed"] + "noise_d = 4.356e-5\nrealizations = 8\n";
        t["noise-0.2"] = t["mixed"] + "noise_d = 4e-4\nrealizations = 8\n";
        // weak signal detuned from the omega3 transition
        t["off-resonance"] = base + "g = 1\namp_pump = 15\namp_weak = 0.1\nomega_weak = 1.113*omega3\n";
        // weak coupling, eps/Delta = 0.5 with A/Delta = 12
        t["weak-coupling"] = base + "g = 0.1\namp_pump = 12\namp_weak = 0.5\nomega_weak = omega3\n";
        return t;
    }();
    return table;
}

}  // namespace

ConfigError::ConfigError(std::size_t line_, const std::string& what)
    : InvalidParameter("line " + std::to_string(line_) + ": " + what), line(line_) {}

FrequencySpec FrequencySpec::parse(std::string_view text) {
    text = trim(unquote(trim(text)));
    if (auto v = to_double(text)) return {*v, 0};

    FrequencySpec out;
    std::string_view sym = text;
    if (const auto star = text.find('*'); star != std::string_view::npos) {
        auto lhs = trim(text.substr(0, star));
        auto rhs = trim(text.substr(star + 1));
        if (auto c = to_double(lhs)) {
            out.scale = *c;
            sym = rhs;
        } else if (auto c2 = to_double(rhs)) {
            out.scale = *c2;
            sym = lhs;
        } else {
            throw InvalidParameter("cannot parse frequency '" + std::string(text) + "'");
        }
    }
    if (!sym.starts_with("omega"))
        throw InvalidParameter("cannot parse frequency '" + std::string(text) + "'");
    const auto idx = to_integer<int>(sym.substr(5));
    if (!idx || *idx < 1 || *idx > 4)
        throw InvalidParameter("unresolvable symbolic frequency '" + std::string(sym)
                               + "' (expected omega1..omega4)");
    out.transition = *idx;
    return out;
}

double FrequencySpec::resolve(const TransitionFrequencies& tf) const {
    return transition == 0 ? scale : scale * tf[transition];
}

std::string FrequencySpec::to_string() const {
    if (transition == 0) return fmt17(scale);
    const std::string sym = "omega" + std::to_string(transition);
    return scale == 1.0 ? sym : fmt17(scale) + "*" + sym;
}

TransitionFrequencies ScenarioConfig::transitions() const {
    return transition_frequencies(params.delta1, params.g);
}

void ScenarioConfig::resolve_frequencies() {
    const auto tf = transitions();
    drive.omega_pump = omega_pump_spec.resolve(tf);
    drive.omega_weak = omega_weak_spec.resolve(tf);
}

void ScenarioConfig::set_dt(double dt) {
    integrator.dt = dt;
    if (!sample_stride_explicit && dt > 0)
        integrator.sample_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(kDefaultSampleInterval / dt)));
}

void ScenarioConfig::validate() const {
    const auto& p = params;
    const auto& d = drive;
    const auto& ic = integrator;
    if (!(std::isfinite(p.delta1) && p.delta1 > 0)) key_error("delta", "must be positive");
    if (!(std::isfinite(p.g) && p.g >= 0)) key_error("g", "must be >= 0");
    if (!(p.gamma_phi1 >= 0)) key_error("gamma_phi", "must be >= 0");
    if (!(p.gamma_r1 >= 0)) key_error("gamma_r", "must be >= 0");
    if (!(std::abs(p.zt1) <= 1)) key_error("zt", "must satisfy |zt| <= 1");
    if (!(d.amp_pump >= 0)) key_error("amp_pump", "must be >= 0");
    if (!(d.amp_weak >= 0)) key_error("amp_weak", "must be >= 0");
    if (!(d.noise_d >= 0)) key_error("noise_d", "must be >= 0");
    if (d.amp_pump > 0 && !(d.omega_pump > 0))
        key_error("omega_pump", omega_pump_spec.to_string() + " resolves to " + fmt17(d.omega_pump) + ", must be > 0");
    if (d.amp_weak > 0 && !(d.omega_weak > 0))
        key_error("omega_weak", omega_weak_spec.to_string() + " resolves to " + fmt17(d.omega_weak) + ", must be > 0");
    if (!(std::isfinite(ic.dt) && ic.dt > 0)) key_error("dt", "must be positive");
    if (!(std::isfinite(ic.t_total) && ic.t_total > 0)) key_error("t_total", "must be positive");
    if (!(ic.t_transient >= 0 && ic.t_transient < ic.t_total))
        key_error("t_transient", "must satisfy 0 <= t_transient < t_total");
    if (ic.sample_stride < 1) key_error("sample_stride", "must be >= 1");
    if (ic.n_realizations < 1) key_error("realizations", "must be >= 1");
    if (ic.method == Method::rk4 && d.noise_d > 0)
        key_error("method", "rk4 is deterministic; use euler, rk4_em or rk4_strat with noise_d > 0");
    if (analysis.k_max < 0) key_error("k_max", "must be >= 0");
    if (analysis.l_max < 0) key_error("l_max", "must be >= 0");
    if (!(analysis.tol_match_bins > 0)) key_error("tol_match", "must be positive");
    const double s = stability_number(p, d, ic.dt);
    if (s > kStabilityBound)
        key_error("dt", "stability guard violated: dt * max(A + eps + 4 sqrt(2D/dt), 2 sqrt(delta^2+g^2)) = "
                            + fmt17(s) + " > " + fmt17(kStabilityBound));
    const double span = ic.t_total - ic.t_transient;
    if (span / ic.sample_interval() < static_cast<double>(kMinSpectrumSamples))
        key_error("t_total", "fewer than " + std::to_string(kMinSpectrumSamples) + " samples after the transient");

    p.validate();
    d.validate();
    ic.validate(p, d);
}

ScenarioConfig ScenarioConfig::pump_only() const {
    ScenarioConfig c = *this;
    c.drive.amp_weak = 0.0;
    return c;
}

ScenarioConfig ScenarioConfig::halved_dt() const {
    ScenarioConfig c = *this;
    c.integrator.dt = integrator.dt / 2.0;
    c.integrator.sample_stride = integrator.sample_stride * 2;
    c.integrator.noise_refinement = integrator.noise_refinement + 1;
    c.sample_stride_explicit = true;
    return c;
}

std::string ScenarioConfig::to_text() const {
    std::ostringstream os;
    os << "delta = " << fmt17(params.delta1) << "\n"
       << "g = " << fmt17(params.g) << "\n"
       << "gamma_phi = " << fmt17(params.gamma_phi1) << "\n"
       << "gamma_r = " << fmt17(params.gamma_r1) << "\n"
       << "zt = " << fmt17(params.zt1) << "\n"
       << "amp_pump = " << fmt17(drive.amp_pump) << "\n"
       << "omega_pump = " << omega_pump_spec.to_string() << "\n"
       << "amp_weak = " << fmt17(drive.amp_weak) << "\n"
       << "omega_weak = " << omega_weak_spec.to_string() << "\n"
       << "noise_d = " << fmt17(drive.noise_d) << "\n"
       << "dt = " << fmt17(integrator.dt) << "\n"
       << "t_total = " << fmt17(integrator.t_total) << "\n"
       << "t_transient = " << fmt17(integrator.t_transient) << "\n"
       << "sample_stride = " << integrator.sample_stride << "\n"
       << "method = " << to_string(integrator.method) << "\n"
       << "seed = " << integrator.seed << "\n"
       << "realizations = " << integrator.n_realizations << "\n"
       << "window = " << to_string(analysis.window) << "\n"
       << "k_max = " << analysis.k_max << "\n"
       << "l_max = " << analysis.l_max << "\n"
       << "tol_match = " << fmt17(analysis.tol_match_bins) << "\n";
    return os.str();
}

ScenarioConfig parse_config(std::string_view text) {
    std::map<std::string, Entry, std::less<>> entries;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError(line_no, "missing key before '='");
        if (value.empty()) throw ConfigError(line_no, "missing value for '" + key + "'");
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
            throw ConfigError(line_no, "unknown key '" + key + "'");
        if (entries.contains(key)) throw ConfigError(line_no, "duplicate key '" + key + "'");
        entries.emplace(key, Entry{value, line_no});
    }

    auto number = [&](std::string_view key, double fallback) {
        const auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        const auto v = to_double(unquote(it->second.value));
        if (!v) throw ConfigError(it->second.line, std::string(key) + ": expected a number, got '" + it->second.value + "'");
        return *v;
    };
    auto integer = [&](std::string_view key, std::uint64_t fallback) {
        const auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        const auto v = to_integer<std::uint64_t>(unquote(it->second.value));
        if (!v) throw ConfigError(it->second.line, std::string(key) + ": expected a non-negative integer, got '" + it->second.value + "'");
        return *v;
    };
    auto word = [&](std::string_view key) -> std::optional<std::pair<std::string, std::size_t>> {
        const auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        return std::pair{std::string(unquote(it->second.value)), it->second.line};
    };
    auto frequency = [&](std::string_view key) {
        const auto w = word(key);
        if (!w) return FrequencySpec{0.0, 0};
        try {
            return FrequencySpec::parse(w->first);
        } catch (const InvalidParameter& e) {
            throw ConfigError(w->second, std::string(key) + ": " + e.what());
        }
    };

    ScenarioConfig c;
    c.params = QubitPairParams::identical(number("delta", 1.0), number("g", 0.0), number("gamma_phi", 0.0),
                                          number("gamma_r", 0.0), number("zt", 1.0));
    c.drive.amp_pump = number("amp_pump", 0.0);
    c.drive.amp_weak = number("amp_weak", 0.0);
    c.drive.noise_d = number("noise_d", 0.0);
    c.omega_pump_spec = frequency("omega_pump");
    c.omega_weak_spec = frequency("omega_weak");

    const bool noisy = c.drive.noise_d > 0;
    c.integrator.method = noisy ? Method::rk4_em : Method::rk4;
    if (const auto m = word("method")) {
        try {
            c.integrator.method = method_from_string(m->first);
        } catch (const InvalidParameter& e) {
            throw ConfigError(m->second, std::string("method: ") + e.what());
        }
    }
    if (const auto w = word("window")) {
        try {
            c.analysis.window = window_from_string(w->first);
        } catch (const InvalidParameter& e) {
            throw ConfigError(w->second, std::string("window: ") + e.what());
        }
    }

    const double default_dt = c.integrator.method == Method::euler ? 1e-4 : 1e-3;
    c.sample_stride_explicit = entries.contains("sample_stride");
    c.integrator.sample_stride = static_cast<std::size_t>(integer("sample_stride", 1));
    c.set_dt(number("dt", default_dt));
    c.integrator.t_total = number("t_total", 1.05e5);
    c.integrator.t_transient = number("t_transient", 5000.0);
    c.integrator.seed = integer("seed", 1);
    c.integrator.n_realizations = static_cast<std::size_t>(integer("realizations", noisy ? 8 : 1));
    c.analysis.k_max = static_cast<int>(number("k_max", 30));
    c.analysis.l_max = static_cast<int>(number("l_max", 3));
    c.analysis.tol_match_bins = number("tol_match", 3.0);

    if (c.params.delta1 > 0 && c.params.g >= 0) c.resolve_frequencies();
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    ScenarioConfig c = parse_config(buf.str());
    c.name = path.stem().string();
    return c;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : presets()) names.push_back(k);
    return names;
}

std::optional<std::string> preset_text(std::string_view name) {
    const auto it = presets().find(name);
    if (it == presets().end()) return std::nullopt;
    return it->second;
}

ScenarioConfig preset(std::string_view name) {
    const auto text = preset_text(name);
    if (!text) throw InvalidParameter("unknown preset '" + std::string(name) + "'");
    ScenarioConfig c = parse_config(*text);
    c.name = std::string(name);
    return c;
}

}  // namespace qpamp
