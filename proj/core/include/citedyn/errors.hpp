#pragma once

#include <stdexcept>

namespace citedyn {

/// Malformed or inconsistent input data (records, trajectories, configs).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The numerics could not produce a usable result (e.g. no finite starting
/// point for the sampler).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace citedyn
