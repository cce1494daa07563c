#include "dsc/cli.hpp"

#include "dsc/config.hpp"
#include "dsc/errors.hpp"
#include "dsc/fitting.hpp"
#include "dsc/io.hpp"
#include "dsc/lamb_shift.hpp"
#include "dsc/rabi.hpp"
#include "dsc/resonator.hpp"
#include "dsc/spectroscopy.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef DSC_DEFAULT_CONFIG
#define DSC_DEFAULT_CONFIG "config/reference_device.json"
#endif

namespace dsc::cli {

std::string default_config_path() { return DSC_DEFAULT_CONFIG; }

namespace {

struct Common {
    std::string config_path = default_config_path();
    std::string out_path;
    std::string format;
    bool lenient = false;
};

struct Options {
    Common common;
    std::optional<double> eps_min, eps_max, eps_single;
    std::optional<int> eps_steps;
    std::optional<int> n_modes;
    std::optional<double> n_cutoff;
    std::optional<double> tolerance;
    std::optional<int> max_iterations;
    std::string cutoff = "exact";
    std::string coupling_path = "ratio";
    std::vector<double> l_c_values{100.0, 231.0, 400.0};
    std::string peaks_path;
    std::string labels = "02,03,12,13";
    double noise_mhz = 0.0;
    std::uint64_t seed = 0;
};

template <class T>
const T& require(const std::optional<T>& v, const char* section) {
    if (!v) throw ValidationError(std::string("config has no '") + section + "' section");
    return *v;
}

resonator::Cutoff parse_cutoff(const std::string& s) {
    if (s == "exact") return resonator::Cutoff::Exact;
    if (s == "lc") return resonator::Cutoff::CouplingOnly;
    if (s == "ideal") return resonator::Cutoff::Ideal;
    throw ValidationError("unknown cutoff mode '" + s + "' (exact|lc|ideal)");
}

class Runner {
public:
    Runner(const Options& opt, std::ostream& out, std::ostream& err) : opt_(opt), out_(out), err_(err) {}

    config::RunConfig load() {
        config::RunConfig cfg = config::load_config(opt_.common.config_path, !opt_.common.lenient);
        for (const std::string& w : cfg.warnings) err_ << "warning: " << w << '\n';
        return cfg;
    }

    io::Format format(const config::RunConfig& cfg, io::Format fallback) const {
        if (!opt_.common.format.empty()) return io::parse_format(opt_.common.format);
        return cfg.output.format.value_or(fallback);
    }

    void emit(const config::RunConfig& cfg, const std::string& content) {
        std::optional<std::filesystem::path> path;
        if (!opt_.common.out_path.empty()) path = opt_.common.out_path;
        else if (cfg.output.path) path = cfg.output.path;
        if (path) {
            io::write_file_atomic(*path, content);
        } else {
            out_ << content;
        }
    }

    int modes() {
        const auto cfg = load();
        const auto& dev = require(cfg.device, "device");
        const auto& q = require(cfg.qrm, "qrm");
        const auto path = opt_.coupling_path == "absolute" ? resonator::CouplingPath::Absolute
                          : opt_.coupling_path == "ratio"  ? resonator::CouplingPath::Ratio
                                                           : throw ValidationError("--coupling must be ratio|absolute");
        const auto table = resonator::mode_table(dev.resonator, opt_.n_modes.value_or(20), q.g1, q.omega1,
                                                 path, parse_cutoff(opt_.cutoff));
        const io::Format f = format(cfg, io::Format::Csv);
        emit(cfg, f == io::Format::Json ? io::modes_json(table) : io::modes_csv(table));
        return kExitOk;
    }

    int couplings() {
        const auto cfg = load();
        const auto& dev = require(cfg.device, "device");
        const auto& q = require(cfg.qrm, "qrm");
        const auto mode = parse_cutoff(opt_.cutoff);
        std::vector<io::CouplingCurve> curves;
        for (double l_c_ph : opt_.l_c_values) {
            resonator::ResonatorModel m = dev.resonator;
            m.l_c = l_c_ph * 1e-12;
            m.validate();
            const auto freqs = resonator::mode_frequencies(m, opt_.n_modes.value_or(30), mode);
            curves.push_back({l_c_ph, resonator::cutoff_frequency(m, mode),
                              resonator::mode_table(m, opt_.n_modes.value_or(30), q.g1, freqs.front(),
                                                    resonator::CouplingPath::Ratio, mode)});
        }
        const io::Format f = format(cfg, io::Format::Csv);
        emit(cfg, f == io::Format::Json ? io::couplings_json(curves, q.g1) : io::couplings_csv(curves, q.g1));
        return kExitOk;
    }

    int lamb_shift() {
        const auto cfg = load();
        const auto& q = require(cfg.qrm, "qrm");
        const config::LambInputs inputs = cfg.lamb_shift.value_or(config::LambInputs{});
        const double n_cutoff = opt_.n_cutoff.value_or(inputs.n_cutoff);
        if (!(n_cutoff > 0.0)) throw ValidationError("n_cutoff missing: set lamb_shift.n_cutoff or --n-cutoff");
        const int n_modes = opt_.n_modes.value_or(inputs.n_modes);
        const double delta = inputs.delta_measured.value_or(
            lamb::single_mode_renorm(q.delta_prime, q.g1, q.omega1,
                                     [&](std::string_view m) { err_ << "warning: " << m << '\n'; }));
        const auto report = lamb::full_report(q.g1, q.omega1, n_cutoff, delta, n_modes);

        const io::Format f = format(cfg, io::Format::Text);
        if (f == io::Format::Json) {
            emit(cfg, io::report_json(report));
        } else if (f == io::Format::Csv) {
            const auto uncut = lamb::per_mode_shifts(q.g1, q.omega1,
                                                     std::numeric_limits<double>::infinity(), n_modes);
            emit(cfg, io::per_mode_csv(report, uncut));
        } else {
            emit(cfg, io::report_text(report));
        }
        return kExitOk;
    }

    spectro::SweepConfig sweep_config(const config::RunConfig& cfg) const {
        spectro::SweepConfig s = cfg.sweep.value_or(spectro::SweepConfig{});
        if (opt_.eps_single) {
            s.epsilon_grid = {*opt_.eps_single};
        } else if (opt_.eps_min || opt_.eps_max || opt_.eps_steps) {
            const double lo = opt_.eps_min.value_or(s.epsilon_grid.empty() ? -1.0 : s.epsilon_grid.front());
            const double hi = opt_.eps_max.value_or(s.epsilon_grid.empty() ? 1.0 : s.epsilon_grid.back());
            s.epsilon_grid = spectro::linear_grid(lo, hi, opt_.eps_steps.value_or(
                                                              std::max<int>(2, static_cast<int>(s.epsilon_grid.size()))));
        }
        if (opt_.tolerance) s.truncation_tol = *opt_.tolerance;
        s.validate();
        return s;
    }

    int spectrum() {
        const auto cfg = load();
        const auto& q = require(cfg.qrm, "qrm");
        const auto lines = spectro::sweep(q, sweep_config(cfg));
        const io::Format f = format(cfg, io::Format::Csv);
        emit(cfg, f == io::Format::Json ? io::spectrum_json(lines) : io::spectrum_csv(lines));
        return kExitOk;
    }

    int synth_peaks() {
        const auto cfg = load();
        const auto& q = require(cfg.qrm, "qrm");
        const auto s = sweep_config(cfg);
        std::vector<std::string> labels;
        std::stringstream ss(opt_.labels);
        for (std::string l; std::getline(ss, l, ',');) {
            if (!l.empty()) labels.push_back(l);
        }
        if (labels.empty()) throw ValidationError("--labels is empty");
        const fit::FitParams truth{q.delta_prime, q.omega1, q.g1};
        const auto data = fit::synthesize(truth, s.epsilon_grid, labels, opt_.noise_mhz * 1e-3, opt_.seed);
        std::ostringstream os;
        os << "# synthetic peaks: delta_prime=" << io::format_number(q.delta_prime)
           << " omega1=" << io::format_number(q.omega1) << " g1=" << io::format_number(q.g1)
           << " noise_mhz=" << io::format_number(opt_.noise_mhz) << " seed=" << opt_.seed << '\n';
        emit(cfg, os.str() + io::peaks_csv(data));
        return kExitOk;
    }

    int fit() {
        const auto cfg = load();
        if (opt_.peaks_path.empty()) throw ValidationError("fit needs --peaks PATH");
        const fit::PeakData data = io::read_peaks_csv(opt_.peaks_path);
        config::FitSetup setup;
        if (cfg.fit) {
            setup = *cfg.fit;
        } else {
            const auto& q = require(cfg.qrm, "qrm");
            setup.initial = {q.delta_prime, q.omega1, q.g1};
        }
        fit::FitOptions fo;
        if (opt_.tolerance) fo.diameter_tol = *opt_.tolerance;
        if (opt_.max_iterations) {
            if (*opt_.max_iterations < 1) throw ValidationError("--max-iterations must be >= 1");
            fo.max_iterations = *opt_.max_iterations;
        }
        const fit::FitResult r = fit::fit(data, setup.initial, setup.bounds, fo);
        const io::Format f = format(cfg, io::Format::Json);
        emit(cfg, f == io::Format::Csv ? io::fit_csv(data, r) : io::fit_json(r));
        if (!r.converged) {
            err_ << "error: fit did not converge within the iteration budget\n";
            return kExitNumerical;
        }
        return kExitOk;
    }

    int reproduce() {
        const auto cfg = load();
        const auto& dev = require(cfg.device, "device");
        const auto& q = require(cfg.qrm, "qrm");
        const auto& li = require(cfg.lamb_shift, "lamb_shift");
        const auto& pub = require(cfg.published, "published");
        const double measured = li.delta_measured.value_or(pub.delta_ghz);

        struct Row {
            std::string name;
            double value;
            double target;
            double tol;
        };
        std::vector<Row> rows;
        const double delta_eq = lamb::single_mode_renorm(q.delta_prime, q.g1, q.omega1, nullptr);
        rows.push_back({"renormalized gap [GHz]", delta_eq, pub.delta_ghz, 1e-3});

        rabi::QrmParams sym = q;
        sym.epsilon = 0.0;
        const auto t = rabi::converged_truncation(sym, 4, 1e-9);
        const auto es = rabi::solve(sym, t);
        rows.push_back({"w01 by diagonalization [GHz]", rabi::transition_frequency(es, 0, 1), pub.delta_ghz, 1e-3});
        rows.push_back({"fundamental-mode shift", 1.0 - delta_eq / q.delta_prime, pub.fundamental_shift, 3e-3});
        rows.push_back({"cutoff frequency, L_c only [GHz]",
                        resonator::cutoff_frequency(dev.resonator, resonator::Cutoff::CouplingOnly),
                        pub.cutoff_ghz, 0.1});
        rows.push_back({"cutoff series", lamb::cutoff_sum(li.n_cutoff), pub.series, 0.01});
        rows.push_back({"asymptotic series", lamb::asymptotic_sum(li.n_cutoff), pub.asymptote, 1e-3});
        const auto report = lamb::full_report(q.g1, q.omega1, li.n_cutoff, measured, li.n_modes);
        rows.push_back({"total shift", report.total_shift, pub.total_shift, 3e-3});
        rows.push_back({"bare gap [GHz]", report.delta0, pub.delta0_ghz, 0.010});

        std::ostringstream os;
        os << std::left << std::setw(36) << "quantity" << std::right << std::setw(16) << "computed"
           << std::setw(12) << "target" << std::setw(12) << "tolerance" << "  status\n";
        bool all = true;
        for (const Row& r : rows) {
            const bool pass = std::abs(r.value - r.target) <= r.tol;
            all = all && pass;
            os << std::left << std::setw(36) << r.name << std::right << std::setw(16) << io::format_number(r.value)
               << std::setw(12) << io::format_number(r.target) << std::setw(12) << io::format_number(r.tol)
               << "  " << (pass ? "PASS" : "FAIL") << '\n';
        }
        const double n_ratio = resonator::cutoff_frequency(dev.resonator, resonator::Cutoff::CouplingOnly) / q.omega1;
        os << "\nn_cutoff from cutoff / omega1 = " << io::format_number(n_ratio) << " (series evaluated at "
           << io::format_number(li.n_cutoff) << ")\n";
        emit(cfg, os.str());
        return all ? kExitOk : kExitNumerical;
    }

private:
    const Options& opt_;
    std::ostream& out_;
    std::ostream& err_;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "run configuration (JSON)");
    sub->add_option("--out", c.out_path, "output file (default: stdout)");
    sub->add_option("--format", c.format, "csv|json|text");
    sub->add_flag("--lenient", c.lenient, "warn about unknown config keys instead of failing");
}

void add_sweep(CLI::App* sub, Options& o) {
    sub->add_option("--epsilon-min", o.eps_min, "lowest bias [GHz]");
    sub->add_option("--epsilon-max", o.eps_max, "highest bias [GHz]");
    sub->add_option("--epsilon-steps", o.eps_steps, "number of bias points");
    sub->add_option("--epsilon", o.eps_single, "single bias point [GHz]");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Deep-strong coupling toolkit: Rabi spectra, resonator modes, multimode Lamb shift"};
    app.require_subcommand(1);

    auto* modes = app.add_subcommand("modes", "mode table of the resonator");
    add_common(modes, opt.common);
    modes->add_option("--n-modes", opt.n_modes, "number of modes");
    modes->add_option("--cutoff", opt.cutoff, "exact|lc|ideal");
    modes->add_option("--coupling", opt.coupling_path, "ratio|absolute");

    auto* couplings = app.add_subcommand("couplings", "g_n / g_1 versus mode frequency for several L_c");
    add_common(couplings, opt.common);
    couplings->add_option("--n-modes", opt.n_modes, "number of modes");
    couplings->add_option("--cutoff", opt.cutoff, "exact|lc|ideal");
    couplings->add_option("--l-c-ph", opt.l_c_values, "coupling inductances [pH]");

    auto* lamb = app.add_subcommand("lamb-shift", "renormalized gaps and Lamb shifts");
    add_common(lamb, opt.common);
    lamb->add_option("--n-modes", opt.n_modes, "per-mode rows");
    lamb->add_option("--n-cutoff", opt.n_cutoff, "cutoff / fundamental frequency ratio");

    auto* spectrum = app.add_subcommand("spectrum", "transition lines versus flux bias");
    add_common(spectrum, opt.common);
    add_sweep(spectrum, opt);
    spectrum->add_option("--tolerance", opt.tolerance, "truncation convergence [GHz]");

    auto* synth = app.add_subcommand("synth-peaks", "synthetic peak list from the model");
    add_common(synth, opt.common);
    add_sweep(synth, opt);
    synth->add_option("--labels", opt.labels, "comma-separated transitions");
    synth->add_option("--noise-mhz", opt.noise_mhz, "Gaussian noise sigma [MHz]");
    synth->add_option("--seed", opt.seed, "noise seed");

    auto* fit = app.add_subcommand("fit", "fit (delta', omega1, g1) to a peak list");
    add_common(fit, opt.common);
    fit->add_option("--peaks", opt.peaks_path, "CSV epsilon_ghz,frequency_ghz[,label][,weight]");
    fit->add_option("--tolerance", opt.tolerance, "simplex diameter [GHz]");
    fit->add_option("--max-iterations", opt.max_iterations, "simplex iterations per run");

    auto* repro = app.add_subcommand("reproduce-paper", "check the published numbers");
    add_common(repro, opt.common);

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    if (!argv_rev.empty()) argv_rev.pop_back();  // program name
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    Runner runner(opt, out, err);
    try {
        if (*modes) return runner.modes();
        if (*couplings) return runner.couplings();
        if (*lamb) return runner.lamb_shift();
        if (*spectrum) return runner.spectrum();
        if (*synth) return runner.synth_peaks();
        if (*fit) return runner.fit();
        if (*repro) return runner.reproduce();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}

}  // namespace dsc::cli
