// config.hpp: run configuration.
//
// JSON tree with the unit in every key name (l_c_ph, omega1_ghz, ...). All
// sections are optional; each subcommand demands the ones it reads. Unknown
// keys are errors unless loading is lenient, in which case they are reported
// as warnings.

#pragma once

#include "dsc/fitting.hpp"
#include "dsc/io.hpp"
#include "dsc/rabi.hpp"
#include "dsc/resonator.hpp"
#include "dsc/spectroscopy.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dsc::config {

struct Device {
    resonator::ResonatorModel resonator;
    resonator::DeviceMeta meta;
};

struct LambInputs {
    double n_cutoff{0.0};
    std::optional<double> delta_measured;  // GHz
    int n_modes{lamb::kDefaultReportModes};
};

struct FitSetup {
    fit::FitParams initial;
    fit::Bounds bounds;
};

// Reference numbers a reproduction run is checked against.
struct Published {
    double delta_ghz{0.0};
    double fundamental_shift{0.0};
    double cutoff_ghz{0.0};
    double series{0.0};
    double asymptote{0.0};
    double total_shift{0.0};
    double delta0_ghz{0.0};
};

struct Output {
    std::optional<std::filesystem::path> path;
    std::optional<io::Format> format;
};

struct RunConfig {
    std::optional<Device> device;
    std::optional<rabi::QrmParams> qrm;
    std::optional<LambInputs> lamb_shift;
    std::optional<spectro::SweepConfig> sweep;
    std::optional<FitSetup> fit;
    std::optional<Published> published;
    Output output;
    std::vector<std::string> warnings;
};

RunConfig load_config(const std::filesystem::path& path, bool strict = true);
RunConfig parse_config(std::string_view text, std::string_view source = "<config>", bool strict = true);

}  // namespace dsc::config
