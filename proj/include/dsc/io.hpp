// io.hpp: numeric formatting, CSV/JSON emitters and whole-file writes.
//
// Every emitter renders numbers through format_number (12 significant
// digits, '.' separator, independent of the C++ locale), so CSV and JSON
// carry identical values.

#pragma once

#include "dsc/fitting.hpp"
#include "dsc/lamb_shift.hpp"
#include "dsc/resonator.hpp"
#include "dsc/spectroscopy.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dsc::io {

inline constexpr int kSignificantDigits = 12;

// Environment variable naming the directory for temporary files.
inline constexpr const char* kTmpDirEnv = "DSC_TMPDIR";

std::string format_number(double v);

// v rounded to 12 significant digits.
double round_sig(double v);

enum class Format { Csv, Json, Text };

Format parse_format(std::string_view s);

// Writes to a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string spectrum_csv(const std::vector<spectro::SpectralLine>& lines);
std::string spectrum_json(const std::vector<spectro::SpectralLine>& lines);

std::string modes_csv(const resonator::ModeTable& table);
std::string modes_json(const resonator::ModeTable& table);

struct CouplingCurve {
    double l_c_ph{0.0};
    double omega_cutoff{0.0};  // GHz
    resonator::ModeTable table;
};

std::string couplings_csv(const std::vector<CouplingCurve>& curves, double g1);
std::string couplings_json(const std::vector<CouplingCurve>& curves, double g1);

// Per-mode shifts with and without the cutoff, one row per odd harmonic.
std::string per_mode_csv(const lamb::LambShiftReport& r, const std::vector<double>& uncut);
std::string report_json(const lamb::LambShiftReport& r);
std::string report_text(const lamb::LambShiftReport& r);

std::string fit_json(const fit::FitResult& r);
std::string fit_csv(const fit::PeakData& data, const fit::FitResult& r);

// Header `epsilon_ghz,frequency_ghz[,label][,weight]`. Errors carry the line number.
fit::PeakData read_peaks_csv(const std::filesystem::path& path);
fit::PeakData parse_peaks_csv(std::string_view text, std::string_view source = "<peaks>");
std::string peaks_csv(const fit::PeakData& data);

std::string read_file(const std::filesystem::path& path);

}  // namespace dsc::io
