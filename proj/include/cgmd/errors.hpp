// Error types shared across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace cgmd {

/// Invalid user input: malformed configs, out-of-range indices, bad
/// preconditions that a caller could have checked.
struct config_error : std::invalid_argument {
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: singular matrices, dependent bases, poles.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

/// A force evaluation found atoms in an unphysical configuration
/// (neighbors crossed); the simulation state has blown up.
struct simulation_blowup : numeric_error {
    explicit simulation_blowup(const std::string& what) : numeric_error(what) {}
};

/// Krylov enrichment produced no independent vectors.
struct enrichment_empty : numeric_error {
    explicit enrichment_empty(const std::string& what) : numeric_error(what) {}
};

}  // namespace cgmd
