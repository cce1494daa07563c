#include "dsc/io.hpp"

#include "dsc/errors.hpp"

#include <json.hpp>

#include <unistd.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

namespace dsc::io {

namespace {

using ojson = nlohmann::ordered_json;

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    for (std::string& s : out) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    }
    return out;
}

double parse_double(const std::string& s, std::string_view where) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ValidationError(std::string(where) + ": '" + s + "' is not a finite number");
    }
    return v;
}

}  // namespace

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, kSignificantDigits);
    return std::string(buf.data(), res.ptr);
}

double round_sig(double v) {
    const std::string s = format_number(v);
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

Format parse_format(std::string_view s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    if (s == "text") return Format::Text;
    throw ValidationError("unknown format '" + std::string(s) + "' (csv|json|text)");
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    fs::path dir = path.parent_path();
    if (dir.empty()) dir = ".";
    if (const char* env = std::getenv(kTmpDirEnv); env != nullptr && *env != '\0') dir = env;

    const fs::path tmp =
        dir / (path.filename().string() + ".tmp." + std::to_string(static_cast<long>(::getpid())));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ValidationError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        // Different filesystem: copy, then drop the temporary.
        fs::copy_file(tmp, path, fs::copy_options::overwrite_existing, ec);
        fs::remove(tmp);
        if (ec) throw ValidationError("cannot move output into " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string spectrum_csv(const std::vector<spectro::SpectralLine>& lines) {
    std::string out = "epsilon_ghz,i,j,label,frequency_ghz,amplitude\n";
    for (const auto& l : lines) {
        out += format_number(l.epsilon) + ',' + std::to_string(l.i) + ',' + std::to_string(l.j) + ',' +
               l.label + ',' + format_number(l.frequency) + ',' + format_number(l.amplitude) + '\n';
    }
    return out;
}

std::string spectrum_json(const std::vector<spectro::SpectralLine>& lines) {
    ojson arr = ojson::array();
    for (const auto& l : lines) {
        arr.push_back({{"epsilon_ghz", round_sig(l.epsilon)},
                       {"i", l.i},
                       {"j", l.j},
                       {"label", l.label},
                       {"frequency_ghz", round_sig(l.frequency)},
                       {"amplitude", round_sig(l.amplitude)}});
    }
    return arr.dump(2) + '\n';
}

std::string modes_csv(const resonator::ModeTable& table) {
    std::string out = "n,omega_n_ghz,k_x,i_zpf_a,g_n_ghz\n";
    for (const auto& r : table) {
        out += std::to_string(r.n) + ',' + format_number(r.omega_n) + ',' + format_number(r.k_x) + ',' +
               format_number(r.i_zpf) + ',' + format_number(r.g_n) + '\n';
    }
    return out;
}

std::string modes_json(const resonator::ModeTable& table) {
    ojson arr = ojson::array();
    for (const auto& r : table) {
        arr.push_back({{"n", r.n},
                       {"omega_n_ghz", round_sig(r.omega_n)},
                       {"k_x", round_sig(r.k_x)},
                       {"i_zpf_a", round_sig(r.i_zpf)},
                       {"g_n_ghz", round_sig(r.g_n)}});
    }
    return arr.dump(2) + '\n';
}

std::string couplings_csv(const std::vector<CouplingCurve>& curves, double g1) {
    std::string out = "l_c_ph,omega_cutoff_ghz,n,omega_n_ghz,g_n_ghz,g_ratio\n";
    for (const auto& c : curves) {
        for (const auto& r : c.table) {
            out += format_number(c.l_c_ph) + ',' + format_number(c.omega_cutoff) + ',' +
                   std::to_string(r.n) + ',' + format_number(r.omega_n) + ',' + format_number(r.g_n) +
                   ',' + format_number(g1 > 0.0 ? r.g_n / g1 : 0.0) + '\n';
        }
    }
    return out;
}

std::string couplings_json(const std::vector<CouplingCurve>& curves, double g1) {
    ojson arr = ojson::array();
    for (const auto& c : curves) {
        for (const auto& r : c.table) {
            arr.push_back({{"l_c_ph", round_sig(c.l_c_ph)},
                           {"omega_cutoff_ghz", round_sig(c.omega_cutoff)},
                           {"n", r.n},
                           {"omega_n_ghz", round_sig(r.omega_n)},
                           {"g_n_ghz", round_sig(r.g_n)},
                           {"g_ratio", round_sig(g1 > 0.0 ? r.g_n / g1 : 0.0)}});
        }
    }
    return arr.dump(2) + '\n';
}

std::string per_mode_csv(const lamb::LambShiftReport& r, const std::vector<double>& uncut) {
    std::string out = "n,omega_n_over_omega1,shift,shift_no_cutoff\n";
    for (std::size_t k = 0; k < r.per_mode_shift.size(); ++k) {
        out += std::to_string(k + 1) + ',' + std::to_string(2 * k + 1) + ',' +
               format_number(r.per_mode_shift[k]) + ',' +
               format_number(k < uncut.size() ? uncut[k] : 0.0) + '\n';
    }
    return out;
}

std::string report_json(const lamb::LambShiftReport& r) {
    ojson per = ojson::array();
    for (double s : r.per_mode_shift) per.push_back(round_sig(s));
    ojson j = {{"delta0_ghz", round_sig(r.delta0)},
               {"delta0_prime_ghz", round_sig(r.delta0_prime)},
               {"delta_ghz", round_sig(r.delta)},
               {"g1_ghz", round_sig(r.g1)},
               {"omega1_ghz", round_sig(r.omega1)},
               {"n_cutoff", round_sig(r.n_cutoff)},
               {"sum_value", round_sig(r.sum_value)},
               {"total_shift", round_sig(r.total_shift)},
               {"fundamental_shift", round_sig(r.fundamental_shift)},
               {"per_mode_shift", per}};
    return j.dump(2) + '\n';
}

std::string report_text(const lamb::LambShiftReport& r) {
    std::ostringstream os;
    auto row = [&](std::string_view name, const std::string& value, std::string_view unit) {
        os << std::left << std::setw(34) << name << std::right << std::setw(18) << value << "  " << unit
           << '\n';
    };
    row("coupling g1", format_number(r.g1), "GHz");
    row("fundamental omega1", format_number(r.omega1), "GHz");
    row("n_cutoff", format_number(r.n_cutoff), "");
    row("cutoff series", format_number(r.sum_value), "");
    row("bare gap delta0", format_number(r.delta0), "GHz");
    row("partially renormalized delta0'", format_number(r.delta0_prime), "GHz");
    row("renormalized gap delta", format_number(r.delta), "GHz");
    row("fundamental shift (vs delta0')", format_number(100.0 * r.fundamental_shift), "%");
    row("total shift (vs delta0)", format_number(100.0 * r.total_shift), "%");
    os << "\nper-mode shift (qubit coupled to that mode only, vs delta0)\n";
    for (std::size_t k = 0; k < r.per_mode_shift.size(); ++k) {
        os << "  n=" << std::left << std::setw(5) << (2 * k + 1) << std::right << std::setw(18)
           << format_number(100.0 * r.per_mode_shift[k]) << "  %\n";
    }
    return os.str();
}

std::string fit_json(const fit::FitResult& r) {
    ojson res = ojson::array();
    for (double v : r.per_point_residuals) res.push_back(round_sig(v));
    ojson j = {{"delta_prime_ghz", round_sig(r.params.delta_prime)},
               {"omega1_ghz", round_sig(r.params.omega1)},
               {"g1_ghz", round_sig(r.params.g1)},
               {"objective_ghz2", round_sig(r.objective)},
               {"residual_rms_ghz", round_sig(r.residual_rms)},
               {"iterations", r.iterations},
               {"converged", r.converged},
               {"verified_n_max", r.verified_n_max},
               {"per_point_residuals_ghz", res}};
    return j.dump(2) + '\n';
}

std::string fit_csv(const fit::PeakData& data, const fit::FitResult& r) {
    std::string out = "epsilon_ghz,frequency_ghz,label,weight,residual_ghz\n";
    for (std::size_t k = 0; k < data.rows.size(); ++k) {
        const auto& row = data.rows[k];
        out += format_number(row.epsilon) + ',' + format_number(row.frequency) + ',' +
               row.label.value_or("") + ',' + format_number(row.weight) + ',' +
               format_number(k < r.per_point_residuals.size() ? r.per_point_residuals[k] : 0.0) + '\n';
    }
    return out;
}

fit::PeakData parse_peaks_csv(std::string_view text, std::string_view source) {
    fit::PeakData data;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    int col_eps = -1, col_freq = -1, col_label = -1, col_weight = -1;
    std::size_t n_cols = 0;
    bool have_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = std::string(source) + ":" + std::to_string(line_no);
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        const auto cells = split(line, ',');
        if (!have_header) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                const auto col = static_cast<int>(c);
                if (cells[c] == "epsilon_ghz") col_eps = col;
                else if (cells[c] == "frequency_ghz") col_freq = col;
                else if (cells[c] == "label") col_label = col;
                else if (cells[c] == "weight") col_weight = col;
                else throw ValidationError(where + ": unknown column '" + cells[c] + "'");
            }
            if (col_eps != 0 || col_freq != 1) {
                throw ValidationError(where + ": header must start with epsilon_ghz,frequency_ghz");
            }
            n_cols = cells.size();
            have_header = true;
            continue;
        }
        if (cells.size() != n_cols) {
            throw ValidationError(where + ": expected " + std::to_string(n_cols) + " fields, got " +
                                  std::to_string(cells.size()));
        }
        fit::PeakRow row;
        row.epsilon = parse_double(cells[0], where);
        row.frequency = parse_double(cells[1], where);
        if (col_label >= 0 && !cells[static_cast<std::size_t>(col_label)].empty()) {
            row.label = cells[static_cast<std::size_t>(col_label)];
            try {
                spectro::parse_label(*row.label);
            } catch (const ValidationError& e) {
                throw ValidationError(where + ": " + e.what());
            }
        }
        if (col_weight >= 0 && !cells[static_cast<std::size_t>(col_weight)].empty()) {
            row.weight = parse_double(cells[static_cast<std::size_t>(col_weight)], where);
            if (!(row.weight > 0.0)) throw ValidationError(where + ": weight must be positive");
        }
        data.rows.push_back(std::move(row));
    }
    if (!have_header) throw ValidationError(std::string(source) + ": empty peak file");
    try {
        data.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(source) + ": " + e.what());
    }
    return data;
}

fit::PeakData read_peaks_csv(const std::filesystem::path& path) {
    return parse_peaks_csv(read_file(path), path.string());
}

std::string peaks_csv(const fit::PeakData& data) {
    std::string out = "epsilon_ghz,frequency_ghz,label,weight\n";
    for (const auto& r : data.rows) {
        out += format_number(r.epsilon) + ',' + format_number(r.frequency) + ',' + r.label.value_or("") +
               ',' + format_number(r.weight) + '\n';
    }
    return out;
}

}  // namespace dsc::io
