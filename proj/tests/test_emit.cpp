#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "qpamp/emit.hpp"

using namespace qpamp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::vector<double>> numeric_rows(const fs::path& p) {
    std::vector<std::vector<double>> rows;
    const auto lines = lines_of(p);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<double> row;
        std::stringstream ss(lines[i]);
        for (std::string cell; std::getline(ss, cell, ',');) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

TimeSeries driven_series(std::uint64_t seed, double noise_d) {
    auto p = QubitPairParams::identical(1.0, 1.0, 1e-3, 1e-3);
    const auto tf = transition_frequencies(1.0, 1.0);
    DriveParams d{15.0, tf.omega2, 0.1, tf.omega3, noise_d, 0.0};
    IntegratorConfig c;
    c.t_total = 300.0;
    c.t_transient = 50.0;
    c.seed = seed;
    c.method = noise_d > 0 ? Method::rk4_em : Method::rk4;
    return integrate(p, d, c, thermal_product_state(p));
}

}  // namespace

TEST_CASE("numbers are written with 17 significant digits and round-trip") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-2.5e-7) == "-2.4999999999999999e-07");
    for (double x : {std::sqrt(2.0), -1.0 / 3.0, 6.02214076e23, 2.2250738585072014e-308})
        CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("time series CSV layout and round trip") {
    TempDir dir("qpamp_emit_ts");
    const auto ts = driven_series(1, 0.0);
    const auto path = dir.path / "timeseries.csv";
    write_timeseries_csv(path, ts);
    const auto lines = lines_of(path);
    CHECK(lines.front() == "t [1/Delta],Z1 [dimensionless],X1 [dimensionless]");
    CHECK(lines.size() == ts.size() + 1);

    const auto back = read_timeseries_csv(path);
    CHECK(back.names == ts.names);
    CHECK(back.t == ts.t);
    CHECK(back.channels == ts.channels);
    CHECK(back.sample_interval == doctest::Approx(ts.sample_interval).epsilon(1e-12));
}

TEST_CASE("spectrum recomputed from the emitted series matches the emitted spectrum") {
    TempDir dir("qpamp_emit_spec");
    const auto ts = driven_series(1, 0.0);
    const auto spec = compute_spectrum(ts, "Z1", 50.0, Window::rect);
    write_timeseries_csv(dir.path / "ts.csv", ts);
    write_spectrum_csv(dir.path / "spec.csv", spec);
    CHECK(lines_of(dir.path / "spec.csv").front() == "omega [Delta],S [dimensionless]");

    const auto again = compute_spectrum(read_timeseries_csv(dir.path / "ts.csv"), "Z1", 50.0, Window::rect);
    const auto rows = numeric_rows(dir.path / "spec.csv");
    REQUIRE(rows.size() == again.size());
    double scale = 0.0;
    for (double m : again.magnitude) scale = std::max(scale, m);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(std::abs(rows[k][0] - again.omega[k]) <= 1e-12 * std::max(1.0, again.omega[k]));
        CHECK(std::abs(rows[k][1] - again.magnitude[k]) <= 1e-12 * scale);
    }
}

TEST_CASE("peak table leaves unlabeled peaks blank") {
    TempDir dir("qpamp_emit_peaks");
    PeakSet peaks{{0.828, 0.01, 10, Combination{2, 0}, 1e-5}, {1.7, 0.002, 20, std::nullopt, 0.0},
                  {2.83, 0.003, 30, Combination{1, 1}, -2e-5}};
    write_peaks_csv(dir.path / "peaks.csv", peaks);
    const auto lines = lines_of(dir.path / "peaks.csv");
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "omega [Delta],height [dimensionless],k,l,residual [Delta]");
    CHECK(lines[1].starts_with("0.82799999999999996,0.01,2,0,"));
    CHECK(lines[2] == "1.7,0.002,,,0");
    CHECK(lines[3].find(",1,1,") != std::string::npos);
}

TEST_CASE("identical seeds produce byte-identical files") {
    TempDir dir("qpamp_emit_bytes");
    for (int run = 0; run < 2; ++run) {
        const auto ts = driven_series(42, 4e-4);
        write_timeseries_csv(dir.path / ("ts" + std::to_string(run) + ".csv"), ts);
        write_spectrum_csv(dir.path / ("spec" + std::to_string(run) + ".csv"), compute_spectrum(ts, "Z1", 50.0, Window::rect));
    }
    CHECK(slurp(dir.path / "ts0.csv") == slurp(dir.path / "ts1.csv"));
    CHECK(slurp(dir.path / "spec0.csv") == slurp(dir.path / "spec1.csv"));
    write_timeseries_csv(dir.path / "other.csv", driven_series(43, 4e-4));
    CHECK(slurp(dir.path / "ts0.csv") != slurp(dir.path / "other.csv"));
}

TEST_CASE("SVG plots are self-contained and annotate labeled peaks") {
    TempDir dir("qpamp_emit_svg");
    const auto ts = driven_series(1, 0.0);
    const auto spec = compute_spectrum(ts, "Z1", 50.0, Window::rect);
    PeakSet peaks{{spec.omega[40], spec.magnitude[40] + 1e-3, 40, Combination{-1, 1}, 0.0}};
    write_spectrum_svg(dir.path / "spec.svg", spec, peaks, "Z1 & friends");
    const auto svg = slurp(dir.path / "spec.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("(-1,1)") != std::string::npos);
    CHECK(svg.find("&amp;") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);

    write_trajectory_svg(dir.path / "traj.svg", ts, "Z1", "trajectory", 0.0, 100.0);
    const auto traj = slurp(dir.path / "traj.svg");
    CHECK(traj.find("<path") != std::string::npos);
    CHECK(traj.find("</svg>") != std::string::npos);
}

TEST_CASE("I/O failures name the path") {
    TempDir dir("qpamp_emit_io");
    const auto blocker = dir.path / "file";
    { std::ofstream(blocker) << "x"; }
    try {
        write_spectrum_csv(blocker / "sub" / "s.csv", Spectrum{});
        FAIL("expected an I/O error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("file") != std::string::npos);
    }
    CHECK_THROWS_AS(read_timeseries_csv(dir.path / "absent.csv"), IoError);
    { std::ofstream(dir.path / "bad.csv") << "t,Z1\n0,1\n0.1,oops\n"; }
    CHECK_THROWS_AS(read_timeseries_csv(dir.path / "bad.csv"), IoError);
}
