#include "dsc/fitting.hpp"

#include "dsc/errors.hpp"
#include "dsc/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

namespace dsc::fit {

void PeakData::validate() const {
    if (rows.size() < 3) throw ValidationError("peak data needs at least 3 rows");
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const PeakRow& r = rows[k];
        const std::string where = "peak row " + std::to_string(k + 1);
        if (!std::isfinite(r.epsilon) || !std::isfinite(r.frequency)) {
            throw ValidationError(where + ": non-finite value");
        }
        if (!(r.weight > 0.0) || !std::isfinite(r.weight)) {
            throw ValidationError(where + ": weight must be positive");
        }
        if (r.label) spectro::parse_label(*r.label);
    }
    const double e0 = rows.front().epsilon;
    if (std::all_of(rows.begin(), rows.end(), [&](const PeakRow& r) { return r.epsilon == e0; })) {
        throw ValidationError("peak data is degenerate: every row has the same bias");
    }
}

bool Bounds::contains(const FitParams& p) const {
    const auto a = p.as_array();
    for (std::size_t k = 0; k < 3; ++k) {
        if (a[k] < range[k].first || a[k] > range[k].second) return false;
    }
    return true;
}

void Bounds::validate() const {
    static constexpr const char* names[] = {"delta_prime", "omega1", "g1"};
    for (std::size_t k = 0; k < 3; ++k) {
        if (!(range[k].first <= range[k].second) || !std::isfinite(range[k].first) ||
            !std::isfinite(range[k].second)) {
            throw ValidationError(std::string("bounds.") + names[k] + ": need finite min <= max");
        }
    }
    if (range[1].first <= 0.0) throw ValidationError("bounds.omega1: lower bound must be > 0");
    if (range[0].first < 0.0 || range[2].first < 0.0) {
        throw ValidationError("bounds: delta_prime and g1 must be non-negative");
    }
}

namespace {

struct Spectrum {
    rabi::EigenSystem es;
    bool has_vectors{false};
    rabi::FockTruncation t;
};

Spectrum spectrum_at(const FitParams& params, double epsilon, int n_max, bool vectors) {
    const rabi::QrmParams p = params.at(epsilon);
    const rabi::FockTruncation t{n_max};
    Spectrum s;
    s.t = t;
    if (vectors) {
        s.es = rabi::solve(p, t);
        s.has_vectors = true;
    } else {
        s.es.values = rabi::lowest_eigenvalues(p, t, t.dimension());
    }
    return s;
}

double line_frequency(const Spectrum& s, const std::optional<std::string>& label, double measured,
                      const FitOptions& opts) {
    const auto dim = static_cast<std::size_t>(s.es.values.size());
    if (label) {
        const auto [i, j] = spectro::parse_label(*label);
        if (j >= dim) throw ValidationError("transition " + *label + " not in the truncated spectrum");
        return s.es.values[static_cast<Eigen::Index>(j)] - s.es.values[static_cast<Eigen::Index>(i)];
    }
    double best = std::numeric_limits<double>::quiet_NaN();
    double best_gap = std::numeric_limits<double>::infinity();
    const auto top = std::min<std::size_t>(static_cast<std::size_t>(opts.nearest_levels), dim);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = i + 1; j < top; ++j) {
            if (rabi::drive_matrix_element(s.es, i, j, s.t) < opts.amplitude_floor) continue;
            const double f = rabi::transition_frequency(s.es, i, j);
            if (std::abs(f - measured) < best_gap) {
                best_gap = std::abs(f - measured);
                best = f;
            }
        }
    }
    if (!std::isfinite(best)) throw ValidationError("no allowed transition to assign a peak to");
    return best;
}

// Rows grouped by bias so each bias is diagonalized once.
std::vector<double> residuals_at(const PeakData& data, const FitParams& params, int n_max,
                                 const FitOptions& opts) {
    std::map<double, std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < data.rows.size(); ++k) groups[data.rows[k].epsilon].push_back(k);

    std::vector<double> res(data.rows.size());
    for (const auto& [eps, idx] : groups) {
        const bool vectors = std::any_of(idx.begin(), idx.end(),
                                         [&](std::size_t k) { return !data.rows[k].label; });
        const Spectrum s = spectrum_at(params, eps, n_max, vectors);
        for (std::size_t k : idx) {
            const PeakRow& r = data.rows[k];
            res[k] = line_frequency(s, r.label, r.frequency, opts) - r.frequency;
        }
    }
    return res;
}

// Canonical row order, so the objective is bit-identical under row permutations.
std::vector<std::size_t> canonical_order(const PeakData& data) {
    std::vector<std::size_t> order(data.rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const PeakRow& x = data.rows[a];
        const PeakRow& y = data.rows[b];
        return std::tie(x.epsilon, x.frequency, x.label, x.weight) <
               std::tie(y.epsilon, y.frequency, y.label, y.weight);
    });
    return order;
}

double weighted_mean_square(const PeakData& data, const std::vector<double>& res,
                            const std::vector<std::size_t>& order) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k : order) {
        num += data.rows[k].weight * res[k] * res[k];
        den += data.rows[k].weight;
    }
    return num / den;
}

struct SimplexOutcome {
    std::vector<double> x;
    double f{0.0};
    int iterations{0};
    bool converged{false};
    std::vector<double> trace;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Bounded Nelder-Mead: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
// Trial points are clamped into the box.
SimplexOutcome nelder_mead(const Objective& f, const std::vector<double>& x0,
                           const std::vector<double>& step, const std::vector<double>& lo,
                           const std::vector<double>& hi, const FitOptions& opts) {
    const std::size_t n = x0.size();
    auto clamp = [&](std::vector<double> x) {
        for (std::size_t k = 0; k < n; ++k) x[k] = std::clamp(x[k], lo[k], hi[k]);
        return x;
    };

    std::vector<std::vector<double>> pts{clamp(x0)};
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> v = x0;
        v[k] += step[k];
        if (v[k] > hi[k]) v[k] = x0[k] - step[k];
        pts.push_back(clamp(v));
    }
    std::vector<double> vals;
    for (const auto& p : pts) vals.push_back(f(p));

    SimplexOutcome out;
    std::vector<double> mean_history;
    auto order_simplex = [&] {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        std::vector<std::vector<double>> p2;
        std::vector<double> v2;
        for (std::size_t k : idx) {
            p2.push_back(pts[k]);
            v2.push_back(vals[k]);
        }
        pts = std::move(p2);
        vals = std::move(v2);
    };

    order_simplex();
    for (int it = 0; it < opts.max_iterations; ++it) {
        std::vector<double> centroid(n, 0.0);
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[v][k] / static_cast<double>(n);
        }
        auto along = [&](double coef, const std::vector<double>& from) {
            std::vector<double> x(n);
            for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + coef * (from[k] - centroid[k]);
            return clamp(x);
        };
        const std::vector<double>& worst = pts[n];
        const std::vector<double> xr = along(-1.0, worst);
        const double fr = f(xr);
        if (fr < vals[0]) {
            const std::vector<double> xe = along(-2.0, worst);
            const double fe = f(xe);
            if (fe < fr) {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if (fr < vals[n - 1]) {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            bool accepted = false;
            if (fr < vals[n]) {
                const std::vector<double> xc = along(-0.5, worst);
                const double fc = f(xc);
                if (fc <= fr) {
                    pts[n] = xc;
                    vals[n] = fc;
                    accepted = true;
                }
            } else {
                const std::vector<double> xc = along(0.5, worst);
                const double fc = f(xc);
                if (fc < vals[n]) {
                    pts[n] = xc;
                    vals[n] = fc;
                    accepted = true;
                }
            }
            if (!accepted) {
                for (std::size_t v = 1; v <= n; ++v) {
                    for (std::size_t k = 0; k < n; ++k) pts[v][k] = pts[0][k] + 0.5 * (pts[v][k] - pts[0][k]);
                    pts[v] = clamp(pts[v]);
                    vals[v] = f(pts[v]);
                }
            }
        }
        order_simplex();
        out.iterations = it + 1;
        out.trace.push_back(vals[0]);

        double diameter = 0.0;
        for (std::size_t v = 1; v <= n; ++v) {
            for (std::size_t k = 0; k < n; ++k) diameter = std::max(diameter, std::abs(pts[v][k] - pts[0][k]));
        }
        mean_history.push_back(std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(n + 1));
        const std::size_t cycle = n + 1;
        const bool stalled = mean_history.size() > cycle &&
                             mean_history[mean_history.size() - 1 - cycle] - mean_history.back() <
                                 opts.improvement_tol;
        if (diameter < opts.diameter_tol || stalled) {
            out.converged = true;
            break;
        }
    }
    out.x = pts[0];
    out.f = vals[0];
    return out;
}

std::vector<double> simplex_steps(const std::vector<double>& x, double rel) {
    std::vector<double> s;
    for (double v : x) s.push_back(std::abs(v) > 1e-3 ? rel * std::abs(v) : 0.01);
    return s;
}

int verification_truncation(const PeakData& data, const FitParams& params, const FitOptions& opts) {
    int levels = opts.nearest_levels;
    for (const PeakRow& r : data.rows) {
        if (r.label) levels = std::max(levels, static_cast<int>(spectro::parse_label(*r.label).second) + 1);
    }
    int n = 1;
    std::vector<double> seen;
    for (const PeakRow& r : data.rows) {
        if (std::find(seen.begin(), seen.end(), r.epsilon) != seen.end()) continue;
        seen.push_back(r.epsilon);
        n = std::max(n, rabi::converged_truncation(params.at(r.epsilon), levels, opts.verify_tol).n_max);
    }
    return n;
}

}  // namespace

double model_frequency(const FitParams& params, double epsilon,
                       const std::optional<std::string>& label, double measured,
                       const FitOptions& opts) {
    return line_frequency(spectrum_at(params, epsilon, opts.n_max, !label), label, measured, opts);
}

double objective(const PeakData& data, const FitParams& params, const FitOptions& opts) {
    return weighted_mean_square(data, residuals_at(data, params, opts.n_max, opts),
                                canonical_order(data));
}

FitResult fit(const PeakData& data, const FitParams& initial, const Bounds& bounds,
              const FitOptions& opts) {
    data.validate();
    bounds.validate();
    if (!bounds.contains(initial)) throw ValidationError("fit: initial parameters are outside the bounds");

    const std::vector<std::size_t> order = canonical_order(data);
    const Objective f = [&](const std::vector<double>& x) {
        const FitParams p{x[0], x[1], x[2]};
        return weighted_mean_square(data, residuals_at(data, p, opts.n_max, opts), order);
    };
    std::vector<double> lo, hi;
    for (const auto& [a, b] : bounds.range) {
        lo.push_back(a);
        hi.push_back(b);
    }
    const auto a0 = initial.as_array();
    std::vector<double> x0(a0.begin(), a0.end());

    SimplexOutcome first = nelder_mead(f, x0, simplex_steps(x0, opts.initial_step), lo, hi, opts);
    SimplexOutcome second = nelder_mead(f, first.x, simplex_steps(first.x, opts.initial_step), lo, hi, opts);

    FitResult r;
    r.params = FitParams{second.x[0], second.x[1], second.x[2]};
    r.iterations = first.iterations + second.iterations;
    r.converged = second.converged;
    r.trace = first.trace;
    r.trace.insert(r.trace.end(), second.trace.begin(), second.trace.end());

    r.verified_n_max = std::max(opts.n_max, verification_truncation(data, r.params, opts));
    r.per_point_residuals = residuals_at(data, r.params, r.verified_n_max, opts);
    r.objective = weighted_mean_square(data, r.per_point_residuals, order);
    double ss = 0.0;
    for (double v : r.per_point_residuals) ss += v * v;
    r.residual_rms = std::sqrt(ss / static_cast<double>(r.per_point_residuals.size()));
    return r;
}

Profile profile(const PeakData& data, const FitResult& best, Param which,
                const std::vector<double>& rel_offsets, const Bounds& bounds, double flat_rms,
                const FitOptions& opts) {
    data.validate();
    if (rel_offsets.empty()) throw ValidationError("profile: no offsets");
    const auto fixed = static_cast<std::size_t>(which);
    const std::vector<std::size_t> order = canonical_order(data);
    const auto best_arr = best.params.as_array();

    std::vector<std::size_t> free_idx;
    for (std::size_t k = 0; k < 3; ++k) {
        if (k != fixed) free_idx.push_back(k);
    }
    std::vector<double> lo, hi, x0;
    for (std::size_t k : free_idx) {
        lo.push_back(bounds.range[k].first);
        hi.push_back(bounds.range[k].second);
        x0.push_back(best_arr[k]);
    }

    Profile out;
    out.which = which;
    for (double off : rel_offsets) {
        const double value = std::clamp(best_arr[fixed] * (1.0 + off), bounds.range[fixed].first,
                                        bounds.range[fixed].second);
        const Objective f = [&](const std::vector<double>& x) {
            std::array<double, 3> a{};
            a[fixed] = value;
            a[free_idx[0]] = x[0];
            a[free_idx[1]] = x[1];
            return weighted_mean_square(
                data, residuals_at(data, FitParams::from_array(a), opts.n_max, opts), order);
        };
        SimplexOutcome s = nelder_mead(f, x0, simplex_steps(x0, opts.initial_step), lo, hi, opts);
        s = nelder_mead(f, s.x, simplex_steps(s.x, opts.initial_step), lo, hi, opts);
        out.values.push_back(value);
        out.objectives.push_back(s.f);
    }

    // Edge rise: the smaller of the two outermost offsets on either side.
    const double base_rms = std::sqrt(std::max(0.0, objective(data, best.params, opts)));
    double rise_lo = std::numeric_limits<double>::infinity();
    double rise_hi = std::numeric_limits<double>::infinity();
    const auto [mn, mx] = std::minmax_element(rel_offsets.begin(), rel_offsets.end());
    for (std::size_t k = 0; k < rel_offsets.size(); ++k) {
        const double rise = std::sqrt(out.objectives[k]) - base_rms;
        if (rel_offsets[k] == *mn) rise_lo = std::min(rise_lo, rise);
        if (rel_offsets[k] == *mx) rise_hi = std::min(rise_hi, rise);
    }
    out.rms_rise = std::min(rise_lo, rise_hi);
    out.poorly_constrained = out.rms_rise < flat_rms;
    return out;
}

PeakData synthesize(const FitParams& truth, const std::vector<double>& epsilons,
                    const std::vector<std::string>& labels, double noise_sigma, std::uint64_t seed,
                    const FitOptions& opts) {
    int levels = 2;
    for (const std::string& l : labels) {
        levels = std::max(levels, static_cast<int>(spectro::parse_label(l).second) + 1);
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);

    PeakData data;
    for (double eps : epsilons) {
        const rabi::QrmParams p = truth.at(eps);
        const rabi::FockTruncation t = rabi::converged_truncation(p, levels, opts.verify_tol);
        const Eigen::VectorXd values = rabi::lowest_eigenvalues(p, t, levels);
        for (const std::string& l : labels) {
            const auto [i, j] = spectro::parse_label(l);
            double f = values[static_cast<Eigen::Index>(j)] - values[static_cast<Eigen::Index>(i)];
            if (noise_sigma > 0.0) f += noise(rng);
            data.rows.push_back({eps, f, l, 1.0});
        }
    }
    return data;
}

lamb::LambShiftReport report_chain(const FitResult& result, double n_cutoff,
                                   std::optional<double> measured_delta) {
    if (!result.converged) throw ValidationError("report_chain: fit did not converge");
    const FitParams& p = result.params;
    const double delta =
        measured_delta ? *measured_delta : lamb::single_mode_renorm(p.delta_prime, p.g1, p.omega1);
    return lamb::full_report(p.g1, p.omega1, n_cutoff, delta);
}

}  // namespace dsc::fit
