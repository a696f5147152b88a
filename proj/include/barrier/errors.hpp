#pragma once

#include <stdexcept>
#include <string>

namespace barrier {

// grid or quadrature too coarse for the requested evaluation
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a numerical invariant failed beyond its tolerance
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace barrier
