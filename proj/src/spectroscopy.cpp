#include "dsc/spectroscopy.hpp"

#include "dsc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dsc::spectro {

void SweepConfig::validate() const {
    if (epsilon_grid.empty()) throw ValidationError("sweep: epsilon grid is empty");
    for (double e : epsilon_grid) {
        if (!std::isfinite(e)) throw ValidationError("sweep: epsilon grid has a non-finite value");
    }
    if (!(std::isfinite(freq_min) && std::isfinite(freq_max) && freq_min < freq_max)) {
        throw ValidationError("sweep: frequency window needs min < max");
    }
    if (k_levels < 2) throw ValidationError("sweep: k_levels must be >= 2");
    if (!(amplitude_floor >= 0.0)) throw ValidationError("sweep: amplitude_floor must be >= 0");
    if (!(truncation_tol > 0.0)) throw ValidationError("sweep: truncation_tol must be > 0");
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
    if (steps < 1) throw ValidationError("grid needs at least one step");
    if (steps == 1) return {lo};
    if (!(lo < hi)) throw ValidationError("grid needs min < max");
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (steps - 1);
    }
    // Mirror-exact values for symmetric grids.
    if (lo == -hi) {
        for (int k = 0; k < steps / 2; ++k) {
            out[static_cast<std::size_t>(steps - 1 - k)] = -out[static_cast<std::size_t>(k)];
        }
        if (steps % 2 == 1) out[static_cast<std::size_t>(steps / 2)] = 0.0;
    }
    return out;
}

std::string transition_label(std::size_t i, std::size_t j) {
    if (i < 10 && j < 10) return std::to_string(i) + std::to_string(j);
    return std::to_string(i) + "-" + std::to_string(j);
}

std::pair<std::size_t, std::size_t> parse_label(const std::string& label) {
    auto digits = [&](const std::string& s) {
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            throw ValidationError("bad transition label '" + label + "'");
        }
        return static_cast<std::size_t>(std::stoul(s));
    };
    std::size_t i = 0;
    std::size_t j = 0;
    if (const auto dash = label.find('-'); dash != std::string::npos) {
        i = digits(label.substr(0, dash));
        j = digits(label.substr(dash + 1));
    } else if (label.size() == 2) {
        i = digits(label.substr(0, 1));
        j = digits(label.substr(1, 1));
    } else {
        throw ValidationError("bad transition label '" + label + "'");
    }
    if (!(i < j)) throw ValidationError("transition label '" + label + "' needs i < j");
    return {i, j};
}

std::vector<SpectralLine> lines_at(const rabi::QrmParams& base, double epsilon,
                                   const SweepConfig& cfg) {
    rabi::QrmParams p = base;
    p.epsilon = epsilon;
    const rabi::FockTruncation t =
        rabi::converged_truncation(p, std::max(cfg.k_levels, 4), cfg.truncation_tol);
    const rabi::EigenSystem es = rabi::solve(p, t);
    const auto top = std::min<std::size_t>(static_cast<std::size_t>(cfg.k_levels), es.size());

    std::vector<SpectralLine> out;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = i + 1; j < top; ++j) {
            const double f = rabi::transition_frequency(es, i, j);
            if (f < cfg.freq_min || f > cfg.freq_max) continue;
            out.push_back({epsilon, i, j, f, rabi::drive_matrix_element(es, i, j, t),
                           transition_label(i, j)});
        }
    }
    return out;
}

std::vector<SpectralLine> sweep(const rabi::QrmParams& base, const SweepConfig& cfg) {
    cfg.validate();
    std::vector<SpectralLine> out;
    for (double eps : cfg.epsilon_grid) {
        auto chunk = lines_at(base, eps, cfg);
        out.insert(out.end(), chunk.begin(), chunk.end());
    }
    return out;
}

IndirectDelta indirect_delta(const std::vector<SpectralLine>& lines, double agreement) {
    if (lines.empty()) throw ValidationError("indirect_delta: no lines");
    const double eps = lines.front().epsilon;
    std::map<std::pair<std::size_t, std::size_t>, double> freq;
    for (const SpectralLine& l : lines) {
        if (l.epsilon != eps) throw ValidationError("indirect_delta: lines span several biases");
        freq[{l.i, l.j}] = l.frequency;
    }
    auto need = [&](std::size_t i, std::size_t j) {
        const auto it = freq.find({i, j});
        if (it == freq.end()) {
            throw ValidationError("indirect_delta: missing transition " + transition_label(i, j));
        }
        return it->second;
    };
    IndirectDelta d;
    d.via_03_13 = need(0, 3) - need(1, 3);
    d.via_02_12 = need(0, 2) - need(1, 2);
    if (std::abs(d.via_03_13 - d.via_02_12) > agreement) {
        throw NumericalError("indirect_delta: w03-w13 and w02-w12 disagree");
    }
    d.value = 0.5 * (d.via_03_13 + d.via_02_12);
    return d;
}

double extrapolated_delta(const std::vector<SpectralLine>& lines, double agreement) {
    std::map<double, std::vector<SpectralLine>> by_eps;
    for (const SpectralLine& l : lines) by_eps[l.epsilon].push_back(l);
    if (by_eps.size() < 2) throw ValidationError("extrapolated_delta: need at least two biases");

    // Least squares of w01^2 against eps^2.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(by_eps.size());
    for (const auto& [eps, group] : by_eps) {
        const double w = indirect_delta(group, agreement).value;
        const double x = eps * eps;
        const double y = w * w;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) <= 1e-300) {
        throw ValidationError("extrapolated_delta: biases must differ in magnitude");
    }
    const double intercept = (sxx * sy - sx * sxy) / det;
    if (intercept <= 0.0) throw NumericalError("extrapolated_delta: non-positive intercept");
    return std::sqrt(intercept);
}

}  // namespace dsc::spectro
