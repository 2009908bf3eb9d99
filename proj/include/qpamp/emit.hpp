// emit.hpp: CSV and SVG artifacts

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qpamp/integrate.hpp"
#include "qpamp/spectrum.hpp"

namespace qpamp {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip-safe rendering with 17 significant digits.
std::string format_number(double x);

// Times are written in units of 1/delta and frequencies in units of delta.

void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& ts, double delta = 1.0);
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spec, double delta = 1.0);
void write_peaks_csv(const std::filesystem::path& path, const PeakSet& peaks, double delta = 1.0);

/// Reads a file produced by write_timeseries_csv. Unit suffixes in the header
/// ("t [1/Delta]") are stripped from channel names.
TimeSeries read_timeseries_csv(const std::filesystem::path& path);

/// Log-magnitude spectrum with (k, l) annotations on the labeled peaks.
void write_spectrum_svg(const std::filesystem::path& path, const Spectrum& spec, const PeakSet& peaks,
                        std::string_view title, double delta = 1.0);

/// Linear plot of one channel over [t_begin, t_end] (min/max envelope per pixel column).
/// A negative t_end means the end of the series.
void write_trajectory_svg(const std::filesystem::path& path, const TimeSeries& ts, std::string_view channel,
                          std::string_view title, double t_begin = 0.0, double t_end = -1.0,
                          double delta = 1.0);

}  // namespace qpamp
