#pragma once
#include <stdexcept>
#include <string>

namespace corrcam {

// Error taxonomy shared by library and CLI. The CLI maps each class to a
// distinct exit code (see tools/corrcam_main.cpp): config/data problems are
// reported before any heavy work starts.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration / input data.  Exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

// A requested computation exceeds an explicit resource budget.  Exit code 3.
struct CapacityError : Error {
    using Error::Error;
};

// An iterative solve failed to converge.  Exit code 4.
struct ConvergenceError : Error {
    using Error::Error;
};

// File I/O and format problems.  Exit code 5.
struct IoError : Error {
    using Error::Error;
};

} // namespace corrcam
