#pragma once

#include <stdexcept>
#include <string>

namespace dsc {

// Bad input: malformed files, violated parameter invariants, out-of-range
// indices. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure did not reach its tolerance within its budget.
// The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dsc
