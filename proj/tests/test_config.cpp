#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include <doctest.h>

#include "qpamp/config.hpp"

using namespace qpamp;

namespace {

std::string error_of(std::string_view text) {
    try {
        parse_config(text);
    } catch (const InvalidParameter& e) {
        return e.what();
    }
    return {};
}

std::size_t error_line(std::string_view text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line;
    }
    return 0;
}

}  // namespace

TEST_CASE("symbolic pump frequency resolves against the coupling") {
    const auto c = parse_config("delta = 1\ng = 1\namp_pump = 15\nomega_pump = omega2\n");
    CHECK(c.drive.omega_pump == doctest::Approx(0.4142136).epsilon(1e-7));
    CHECK(c.drive.omega_pump == std::sqrt(2.0) - 1.0);
}

TEST_CASE("scaled symbolic frequencies") {
    const auto c = parse_config("g = 1\namp_pump = 15\nomega_pump = omega2\namp_weak = 0.1\nomega_weak = \"1.113*omega3\"\n");
    CHECK(c.drive.omega_weak == doctest::Approx(1.113 * (std::sqrt(2.0) + 1.0)).epsilon(1e-14));
    CHECK(FrequencySpec::parse("omega3*2").scale == 2.0);
    CHECK(FrequencySpec::parse("omega3*2").transition == 3);
    CHECK(FrequencySpec::parse("0.75").transition == 0);
    CHECK_THROWS_AS(FrequencySpec::parse("omega5"), InvalidParameter);
    CHECK_THROWS_AS(FrequencySpec::parse("2*pi"), InvalidParameter);
    CHECK(FrequencySpec::parse(FrequencySpec::parse("1.113*omega3").to_string()).scale == 1.113);
}

TEST_CASE("invalid values are reported with their key") {
    const auto msg = error_of("g = 1\ngamma_r = -1\n");
    CHECK(msg.find("gamma_r") != std::string::npos);
    CHECK(error_of("zt = 2\n").find("zt") != std::string::npos);
    CHECK(error_of("delta = 0\n").find("delta") != std::string::npos);
    CHECK(error_of("amp_pump = 1\nomega_pump = 0\n").find("omega_pump") != std::string::npos);
    CHECK(error_of("t_transient = 2e5\n").find("t_transient") != std::string::npos);
}

TEST_CASE("parse errors carry line numbers") {
    CHECK(error_line("delta = 1\n# comment\nfoo = 3\n") == 3);
    CHECK(error_line("g = 1\ng = 2\n") == 2);
    CHECK(error_line("g 1\n") == 1);
    CHECK(error_line("g = 1\n\nseed = -4\n") == 3);
    CHECK(error_line("method = leapfrog\n") == 1);
    CHECK(error_line("window = kaiser\n") == 1);
    CHECK(error_line("g = abc\n") == 1);
    CHECK(error_of("omega_weak = omega7\namp_weak = 1\n").find("omega7") != std::string::npos);
}

TEST_CASE("comments, blank lines and defaults") {
    const auto c = parse_config("# header\n\n  g = 0.5   # trailing\n");
    CHECK(c.params.g == 0.5);
    CHECK(c.integrator.method == Method::rk4);
    CHECK(c.integrator.dt == 1e-3);
    CHECK(c.integrator.sample_stride == 100);
    CHECK(c.integrator.t_total == 1.05e5);
    CHECK(c.integrator.t_transient == 5000.0);
    CHECK(c.integrator.n_realizations == 1);
    CHECK(c.analysis.window == Window::rect);
    CHECK(c.analysis.k_max == 30);
    CHECK(c.analysis.l_max == 3);
    CHECK(c.analysis.tol_match_bins == 3.0);

    const auto noisy = parse_config("amp_pump = 1\nomega_pump = 1\nnoise_d = 1e-4\n");
    CHECK(noisy.integrator.method == Method::rk4_em);
    CHECK(noisy.integrator.n_realizations == 8);

    const auto euler = parse_config("method = euler\n");
    CHECK(euler.integrator.dt == 1e-4);
    CHECK(euler.integrator.sample_stride == 1000);

    CHECK_THROWS_AS(parse_config("method = rk4\nnoise_d = 1e-4\n"), InvalidParameter);
}

TEST_CASE("every documented key is accepted") {
    const std::string text =
        "delta = 1\ng = 1\ngamma_phi = 1e-3\ngamma_r = 1e-3\nzt = 1\namp_pump = 15\nomega_pump = omega2\n"
        "amp_weak = 0.1\nomega_weak = omega3\nnoise_d = 0\ndt = 1e-3\nt_total = 20000\nt_transient = 5000\n"
        "sample_stride = 100\nmethod = rk4\nseed = 7\nrealizations = 2\nwindow = hann\nk_max = 25\nl_max = 2\n"
        "tol_match = 2\n";
    const auto c = parse_config(text);
    CHECK(c.integrator.seed == 7);
    CHECK(c.integrator.n_realizations == 2);
    CHECK(c.analysis.window == Window::hann);
    CHECK(c.analysis.k_max == 25);
    CHECK(c.analysis.tol_match_bins == 2.0);
    const auto again = parse_config(c.to_text());
    CHECK(again.to_text() == c.to_text());
    CHECK(again.drive.omega_weak == c.drive.omega_weak);
}

TEST_CASE("presets pin the reference parameters") {
    const auto names = preset_names();
    CHECK(names.size() == 7);
    const double w2 = std::sqrt(2.0) - 1.0, w3 = std::sqrt(2.0) + 1.0;

    const auto pump = preset("pump-only");
    CHECK(pump.params.g == 1.0);
    CHECK(pump.drive.amp_pump == 15.0);
    CHECK(pump.drive.amp_weak == 0.0);
    CHECK(pump.drive.omega_pump == w2);
    CHECK(pump.params.gamma_phi1 == 1e-3);
    CHECK(pump.params.gamma_r2 == 1e-3);
    CHECK(pump.params.zt1 == 1.0);

    const auto sig = preset("signal-only");
    CHECK(sig.drive.amp_pump == 0.0);
    CHECK(sig.drive.amp_weak == 0.1);

    const auto mixed = preset("mixed");
    CHECK(mixed.drive.amp_weak / mixed.drive.amp_pump == doctest::Approx(1.0 / 150.0));
    CHECK(mixed.drive.omega_weak == w3);

    for (auto [name, ratio] : {std::pair{"noise-0.066", 0.066}, std::pair{"noise-0.2", 0.2}}) {
        const auto n = preset(name);
        CHECK(std::sqrt(n.drive.noise_d) / n.drive.amp_weak == doctest::Approx(ratio).epsilon(1e-12));
        CHECK(n.integrator.n_realizations == 8);
        CHECK(n.integrator.method == Method::rk4_em);
    }

    CHECK(preset("off-resonance").drive.omega_weak == doctest::Approx(1.113 * w3).epsilon(1e-15));

    const auto weak = preset("weak-coupling");
    CHECK(weak.params.g == 0.1);
    CHECK(weak.drive.amp_pump == 12.0);
    CHECK(weak.drive.amp_weak == 0.5);
    CHECK(weak.drive.omega_pump == doctest::Approx(std::sqrt(1.01) - 0.1).epsilon(1e-15));

    CHECK_THROWS_AS(preset("nope"), InvalidParameter);
}

TEST_CASE("derived configurations") {
    const auto mixed = preset("mixed");
    const auto pump = mixed.pump_only();
    CHECK(pump.drive.amp_weak == 0.0);
    CHECK(pump.drive.amp_pump == 15.0);
    CHECK(pump.drive.omega_weak == mixed.drive.omega_weak);

    const auto fine = mixed.halved_dt();
    CHECK(fine.integrator.dt == 5e-4);
    CHECK(fine.integrator.sample_interval() == doctest::Approx(mixed.integrator.sample_interval()));
    CHECK(fine.integrator.noise_refinement == mixed.integrator.noise_refinement + 1);

    auto c = mixed;
    c.set_dt(2e-3);
    CHECK(c.integrator.sample_stride == 50);
}

TEST_CASE("config files load by path") {
    const auto dir = std::filesystem::temp_directory_path() / "qpamp_config_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "custom.cfg";
    {
        std::ofstream out(path);
        out << preset_text("mixed").value() << "seed = 5\n";
    }
    const auto c = load_config(path);
    CHECK(c.name == "custom");
    CHECK(c.integrator.seed == 5);
    CHECK_THROWS_AS(load_config(dir / "missing.cfg"), InvalidParameter);
    std::filesystem::remove_all(dir);
}
