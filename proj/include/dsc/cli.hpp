#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dsc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

// Entry point of the dsclamb tool. Output that is not sent to --out goes to
// `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Config used when --config is not given.
std::string default_config_path();

}  // namespace dsc::cli
