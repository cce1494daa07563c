#include "dsc/config.hpp"

#include "dsc/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

namespace dsc::config {

namespace {

using json = nlohmann::json;

// One JSON object plus its dotted path; records the keys it hands out so the
// leftovers can be reported.
class Section {
public:
    Section(const json& node, std::string path, std::string source)
        : node_(node), path_(std::move(path)), source_(std::move(source)) {
        if (!node_.is_object()) fail("", "must be an object");
    }

    [[noreturn]] void fail(std::string_view key, std::string_view msg) const {
        std::string field = path_;
        if (!key.empty()) field += (field.empty() ? "" : ".") + std::string(key);
        throw ValidationError(source_ + ": " + field + ": " + std::string(msg));
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return node_.contains(key);
    }

    double number(const std::string& key) {
        if (!has(key)) fail(key, "missing");
        const json& v = node_.at(key);
        if (!v.is_number()) fail(key, "must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(key, "must be finite");
        return d;
    }

    double number_or(const std::string& key, double fallback) {
        return has(key) ? number(key) : fallback;
    }

    double positive(const std::string& key) {
        const double d = number(key);
        if (!(d > 0.0)) fail(key, "must be > 0");
        return d;
    }

    double nonnegative(const std::string& key) {
        const double d = number(key);
        if (d < 0.0) fail(key, "must be >= 0");
        return d;
    }

    int integer(const std::string& key, int min_value) {
        if (!has(key)) fail(key, "missing");
        const json& v = node_.at(key);
        if (!v.is_number_integer()) fail(key, "must be an integer");
        const auto i = v.get<long long>();
        if (i < min_value) fail(key, "must be >= " + std::to_string(min_value));
        if (i > 100000000) fail(key, "is too large");
        return static_cast<int>(i);
    }

    std::string string(const std::string& key) {
        if (!has(key)) fail(key, "missing");
        const json& v = node_.at(key);
        if (!v.is_string()) fail(key, "must be a string");
        return v.get<std::string>();
    }

    std::pair<double, double> interval(const std::string& key) {
        if (!has(key)) fail(key, "missing");
        const json& v = node_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            fail(key, "must be a [min, max] pair");
        }
        const double lo = v[0].get<double>();
        const double hi = v[1].get<double>();
        if (!(lo <= hi)) fail(key, "needs min <= max");
        return {lo, hi};
    }

    Section child(const std::string& key) {
        if (!has(key)) fail(key, "missing");
        return Section(node_.at(key), join(key), source_);
    }

    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    // Unread keys: error in strict mode, otherwise appended to `warnings`.
    void finish(bool strict, std::vector<std::string>& warnings) const {
        for (const auto& [key, value] : node_.items()) {
            if (seen_.count(key)) continue;
            const std::string msg = source_ + ": " + join(key) + ": unknown key";
            if (strict) throw ValidationError(msg);
            warnings.push_back(msg);
        }
    }

private:
    const json& node_;
    std::string path_;
    std::string source_;
    std::set<std::string> seen_;
};

Device read_device(Section s, bool strict, std::vector<std::string>& warnings) {
    Device d;
    d.resonator.z0 = s.positive("z0_ohm");
    d.resonator.l_total = s.positive("l_total_nh") * 1e-9;
    d.resonator.omega1_bare = s.positive("omega1_bare_ghz");
    d.resonator.l_c = s.positive("l_c_ph") * 1e-12;
    d.resonator.l_2 = s.positive("l_2_ph") * 1e-12;
    d.resonator.i_q = s.positive("i_q_na") * 1e-9;
    d.meta.alpha = s.number("alpha");
    if (!(d.meta.alpha > 0.0 && d.meta.alpha < 1.0)) s.fail("alpha", "must lie in (0, 1)");
    d.meta.e_j = s.positive("e_j_ghz");
    s.finish(strict, warnings);
    return d;
}

rabi::QrmParams read_qrm(Section s, bool strict, std::vector<std::string>& warnings) {
    rabi::QrmParams p;
    p.delta_prime = s.nonnegative("delta_prime_ghz");
    p.epsilon = s.number_or("epsilon_ghz", 0.0);
    p.omega1 = s.positive("omega1_ghz");
    p.g1 = s.nonnegative("g1_ghz");
    s.finish(strict, warnings);
    return p;
}

LambInputs read_lamb(Section s, bool strict, std::vector<std::string>& warnings) {
    LambInputs l;
    l.n_cutoff = s.positive("n_cutoff");
    if (s.has("delta_measured_ghz")) l.delta_measured = s.positive("delta_measured_ghz");
    if (s.has("n_modes")) l.n_modes = s.integer("n_modes", 1);
    s.finish(strict, warnings);
    return l;
}

spectro::SweepConfig read_sweep(Section s, bool strict, std::vector<std::string>& warnings) {
    spectro::SweepConfig c;
    const double lo = s.number("epsilon_min_ghz");
    const double hi = s.number("epsilon_max_ghz");
    const int steps = s.integer("epsilon_steps", 1);
    if (steps > 1 && !(lo < hi)) s.fail("epsilon_max_ghz", "must exceed epsilon_min_ghz");
    c.epsilon_grid = spectro::linear_grid(lo, hi, steps);
    c.freq_min = s.number("freq_min_ghz");
    c.freq_max = s.number("freq_max_ghz");
    if (!(c.freq_min < c.freq_max)) s.fail("freq_max_ghz", "must exceed freq_min_ghz");
    c.k_levels = s.integer("k_levels", 2);
    if (s.has("amplitude_floor")) c.amplitude_floor = s.nonnegative("amplitude_floor");
    if (s.has("truncation_tol_ghz")) c.truncation_tol = s.positive("truncation_tol_ghz");
    s.finish(strict, warnings);
    return c;
}

FitSetup read_fit(Section s, bool strict, std::vector<std::string>& warnings) {
    FitSetup f;
    {
        Section init = s.child("initial");
        f.initial.delta_prime = init.nonnegative("delta_prime_ghz");
        f.initial.omega1 = init.positive("omega1_ghz");
        f.initial.g1 = init.nonnegative("g1_ghz");
        init.finish(strict, warnings);
    }
    if (s.has("bounds")) {
        Section b = s.child("bounds");
        f.bounds.range[0] = b.interval("delta_prime_ghz");
        f.bounds.range[1] = b.interval("omega1_ghz");
        f.bounds.range[2] = b.interval("g1_ghz");
        if (f.bounds.range[1].first <= 0.0) b.fail("omega1_ghz", "lower bound must be > 0");
        if (f.bounds.range[0].first < 0.0) b.fail("delta_prime_ghz", "lower bound must be >= 0");
        if (f.bounds.range[2].first < 0.0) b.fail("g1_ghz", "lower bound must be >= 0");
        b.finish(strict, warnings);
    }
    if (!f.bounds.contains(f.initial)) s.fail("initial", "lies outside the bounds");
    s.finish(strict, warnings);
    return f;
}

Published read_published(Section s, bool strict, std::vector<std::string>& warnings) {
    Published p;
    p.delta_ghz = s.positive("delta_ghz");
    p.fundamental_shift = s.positive("fundamental_shift");
    p.cutoff_ghz = s.positive("cutoff_ghz");
    p.series = s.positive("series");
    p.asymptote = s.positive("asymptote");
    p.total_shift = s.positive("total_shift");
    p.delta0_ghz = s.positive("delta0_ghz");
    s.finish(strict, warnings);
    return p;
}

Output read_output(Section s, bool strict, std::vector<std::string>& warnings) {
    Output o;
    if (s.has("path")) {
        const std::filesystem::path p = s.string("path");
        const auto dir = p.parent_path().empty() ? std::filesystem::path(".") : p.parent_path();
        if (!std::filesystem::is_directory(dir)) s.fail("path", "directory " + dir.string() + " does not exist");
        o.path = p;
    }
    if (s.has("format")) {
        try {
            o.format = io::parse_format(s.string("format"));
        } catch (const ValidationError& e) {
            s.fail("format", e.what());
        }
    }
    s.finish(strict, warnings);
    return o;
}

}  // namespace

RunConfig parse_config(std::string_view text, std::string_view source, bool strict) {
    const std::string src(source);
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports "parse error at line L, column C: ..."
        std::string what = e.what();
        const auto pos = what.find("parse error");
        throw ValidationError(src + ": " + (pos == std::string::npos ? what : what.substr(pos)));
    }

    RunConfig cfg;
    Section top(root, "", src);
    if (top.has("device")) cfg.device = read_device(top.child("device"), strict, cfg.warnings);
    if (top.has("qrm")) cfg.qrm = read_qrm(top.child("qrm"), strict, cfg.warnings);
    if (top.has("lamb_shift")) cfg.lamb_shift = read_lamb(top.child("lamb_shift"), strict, cfg.warnings);
    if (top.has("sweep")) cfg.sweep = read_sweep(top.child("sweep"), strict, cfg.warnings);
    if (top.has("fit")) cfg.fit = read_fit(top.child("fit"), strict, cfg.warnings);
    if (top.has("published")) cfg.published = read_published(top.child("published"), strict, cfg.warnings);
    if (top.has("output")) cfg.output = read_output(top.child("output"), strict, cfg.warnings);
    top.finish(strict, cfg.warnings);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, bool strict) {
    return parse_config(io::read_file(path), path.string(), strict);
}

}  // namespace dsc::config
