#include "qpamp/emit.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace qpamp {

namespace {

constexpr double kWidth = 1000, kHeight = 520;
constexpr double kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

std::string escape(std::string_view s) {
    std::string r;
    for (char c : s) {
        switch (c) {
            case '<': r += "&lt;"; break;
            case '>': r += "&gt;"; break;
            case '&': r += "&amp;"; break;
            default: r += c;
        }
    }
    return r;
}

std::string px(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), std::round(v * 10.0) / 10.0,
                                         std::chars_format::fixed, 1);
    return std::string(buf.data(), ptr);
}

struct Frame {
    double x0, x1, y0, y1;
    double sx(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double sy(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void svg_header(std::ostream& os, std::string_view title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
       << "</text>\n";
}

void svg_axes(std::ostream& os, const Frame& f, std::string_view xlabel, std::string_view ylabel,
              const std::vector<std::pair<double, std::string>>& yticks) {
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
       << "\" height=\"" << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double x = f.x0 + (f.x1 - f.x0) * i / 5.0;
        os << "<text x=\"" << px(f.sx(x)) << "\" y=\"" << px(kHeight - kBottom + 18)
           << "\" text-anchor=\"middle\">" << format_number(std::round(x * 1000.0) / 1000.0) << "</text>\n";
    }
    for (const auto& [y, label] : yticks) {
        os << "<line x1=\"" << kLeft - 4 << "\" x2=\"" << kLeft << "\" y1=\"" << px(f.sy(y)) << "\" y2=\""
           << px(f.sy(y)) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << kLeft - 6 << "\" y=\"" << px(f.sy(y) + 4) << "\" text-anchor=\"end\">" << label
           << "</text>\n";
    }
    os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">" << escape(xlabel)
       << "</text>\n"
       << "<text x=\"18\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << kHeight / 2 << ")\">" << escape(ylabel) << "</text>\n";
}

std::string strip_units(std::string_view header) {
    const auto bracket = header.find('[');
    std::string_view name = header.substr(0, bracket);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    return std::string(name);
}

}  // namespace

std::string format_number(double x) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
    return std::string(buf.data(), ptr);
}

void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& ts, double delta) {
    auto out = open_out(path);
    out << "t [1/Delta]";
    for (const auto& n : ts.names) out << ',' << n << " [dimensionless]";
    out << '\n';
    std::string row;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        row = format_number(ts.t[i] * delta);
        for (const auto& ch : ts.channels) {
            row += ',';
            row += format_number(ch[i]);
        }
        row += '\n';
        out << row;
    }
    finish(out, path);
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spec, double delta) {
    auto out = open_out(path);
    out << "omega [Delta],S [dimensionless]\n";
    for (std::size_t k = 0; k < spec.size(); ++k)
        out << format_number(spec.omega[k] / delta) << ',' << format_number(spec.magnitude[k]) << '\n';
    finish(out, path);
}

void write_peaks_csv(const std::filesystem::path& path, const PeakSet& peaks, double delta) {
    auto out = open_out(path);
    out << "omega [Delta],height [dimensionless],k,l,residual [Delta]\n";
    for (const auto& p : peaks) {
        out << format_number(p.omega / delta) << ',' << format_number(p.height) << ',';
        if (p.label) out << p.label->k << ',' << p.label->l;
        else out << ',';
        out << ',' << format_number(p.residual / delta) << '\n';
    }
    finish(out, path);
}

TimeSeries read_timeseries_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");

    TimeSeries ts;
    {
        std::istringstream hs(line);
        std::string cell;
        bool first = true;
        while (std::getline(hs, cell, ',')) {
            if (first) {
                first = false;
                if (strip_units(cell) != "t") throw IoError(path.string() + ": first column must be t");
                continue;
            }
            ts.names.push_back(strip_units(cell));
            ts.channels.emplace_back();
        }
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::string_view rest = line;
        auto next_value = [&](double& v) {
            const auto comma = rest.find(',');
            const auto cell = rest.substr(0, comma);
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + std::string(cell) + "'");
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        };
        double t = 0.0;
        next_value(t);
        ts.t.push_back(t);
        for (auto& ch : ts.channels) {
            double v = 0.0;
            next_value(v);
            ch.push_back(v);
        }
    }
    if (ts.size() >= 2)
        ts.sample_interval = (ts.t.back() - ts.t.front()) / static_cast<double>(ts.size() - 1);
    return ts;
}

void write_spectrum_svg(const std::filesystem::path& path, const Spectrum& spec, const PeakSet& peaks,
                        std::string_view title, double delta) {
    auto out = open_out(path);
    svg_header(out, title);
    if (spec.size() < 2) {
        out << "</svg>\n";
        finish(out, path);
        return;
    }

    double top = *std::max_element(spec.magnitude.begin(), spec.magnitude.end());
    if (!(top > 0)) top = 1.0;
    double x_max = spec.omega.back() / delta;
    if (!peaks.empty()) x_max = std::min(x_max, 1.1 * peaks.back().omega / delta + 0.5);
    const double y_hi = std::ceil(std::log10(top) + 0.2);
    const double y_lo = y_hi - 6.0;
    const Frame f{0.0, x_max, y_lo, y_hi};

    std::vector<std::pair<double, std::string>> yticks;
    for (double y = y_lo; y <= y_hi + 1e-9; y += 1.0) yticks.emplace_back(y, "1e" + format_number(y));
    svg_axes(out, f, "frequency [Delta]", "S (amplitude)", yticks);

    // max magnitude per pixel column keeps narrow lines visible
    const int columns = static_cast<int>(kWidth - kLeft - kRight);
    std::vector<double> col(columns, 0.0);
    for (std::size_t k = 1; k < spec.size(); ++k) {
        const double x = spec.omega[k] / delta;
        if (x > x_max) break;
        const int c = std::clamp(static_cast<int>((x - f.x0) / (f.x1 - f.x0) * columns), 0, columns - 1);
        col[c] = std::max(col[c], spec.magnitude[k]);
    }
    out << "<polyline fill=\"none\" stroke=\"#222\" stroke-width=\"0.8\" points=\"";
    for (int c = 0; c < columns; ++c) {
        const double y = std::clamp(std::log10(std::max(col[c], 1e-300)), y_lo, y_hi);
        out << px(kLeft + c + 0.5) << ',' << px(f.sy(y)) << ' ';
    }
    out << "\"/>\n";

    std::vector<const Peak*> labeled;
    for (const auto& p : peaks)
        if (p.label && p.omega / delta <= x_max) labeled.push_back(&p);
    std::sort(labeled.begin(), labeled.end(), [](const Peak* a, const Peak* b) { return a->height > b->height; });
    if (labeled.size() > 30) labeled.resize(30);
    for (const Peak* p : labeled) {
        const double x = f.sx(p->omega / delta);
        const double y = f.sy(std::clamp(std::log10(p->height), y_lo, y_hi));
        const char* colour = p->label->l != 0 ? "#c0392b" : "#1f5fa8";
        out << "<circle cx=\"" << px(x) << "\" cy=\"" << px(y) << "\" r=\"2.5\" fill=\"" << colour << "\"/>\n"
            << "<text x=\"" << px(x) << "\" y=\"" << px(y - 6) << "\" text-anchor=\"middle\" font-size=\"9\" fill=\""
            << colour << "\">(" << p->label->k << ',' << p->label->l << ")</text>\n";
    }
    out << "</svg>\n";
    finish(out, path);
}

void write_trajectory_svg(const std::filesystem::path& path, const TimeSeries& ts, std::string_view channel,
                          std::string_view title, double t_begin, double t_end, double delta) {
    const auto& v = ts.channel(channel);
    auto out = open_out(path);
    svg_header(out, title);
    if (ts.size() < 2) {
        out << "</svg>\n";
        finish(out, path);
        return;
    }
    if (t_end < 0 || t_end > ts.t.back()) t_end = ts.t.back();
    t_begin = std::clamp(t_begin, ts.t.front(), t_end);
    const auto i0 = static_cast<std::size_t>(std::lower_bound(ts.t.begin(), ts.t.end(), t_begin) - ts.t.begin());
    const auto i1 = static_cast<std::size_t>(std::upper_bound(ts.t.begin(), ts.t.end(), t_end) - ts.t.begin());

    double lo = 1e300, hi = -1e300;
    for (std::size_t i = i0; i < i1; ++i) {
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
    }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    const Frame f{t_begin * delta, std::max(t_end, t_begin + 1e-12) * delta, lo - pad, hi + pad};
    std::vector<std::pair<double, std::string>> yticks;
    for (int i = 0; i <= 4; ++i) {
        const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
        yticks.emplace_back(y, format_number(std::round(y * 1e4) / 1e4));
    }
    svg_axes(out, f, "t [1/Delta]", std::string(channel), yticks);

    const int columns = static_cast<int>(kWidth - kLeft - kRight);
    std::vector<double> cmin(columns, 1e300), cmax(columns, -1e300);
    for (std::size_t i = i0; i < i1; ++i) {
        const int c = std::clamp(static_cast<int>((ts.t[i] * delta - f.x0) / (f.x1 - f.x0) * columns), 0, columns - 1);
        cmin[c] = std::min(cmin[c], v[i]);
        cmax[c] = std::max(cmax[c], v[i]);
    }
    out << "<path fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"0.8\" d=\"";
    bool started = false;
    for (int c = 0; c < columns; ++c) {
        if (cmin[c] > cmax[c]) continue;
        const double x = kLeft + c + 0.5;
        out << (started ? " L" : "M") << px(x) << ',' << px(f.sy(cmin[c])) << " L" << px(x) << ','
            << px(f.sy(cmax[c]));
        started = true;
    }
    out << "\"/>\n</svg>\n";
    finish(out, path);
}

}  // namespace qpamp
