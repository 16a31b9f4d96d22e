#pragma once

#include <stdexcept>
#include <string>

namespace cdiwm {

/// Invalid user-facing configuration: bad spec fields, malformed or unknown
/// config keys, grids that cannot be constructed.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested quantity is mathematically undefined for the given inputs:
/// zero postselection probability, zero-mass samples, singular postselection,
/// aliasing in the transform path.
class NumericDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimation could not produce a result (flat likelihood, zero photons,
/// no bracket inside the search window).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cdiwm
