#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <string>

#include "barrier/dyadic.hpp"

namespace barrier {

// Spectral multiplier m(lambda), lambda = xi^2. Optional support window
// lets the transforms skip nodes where m vanishes identically.
struct Symbol {
  std::function<std::complex<double>(double)> fn;
  std::string descriptor;
  double lambda_lo = 0.0;
  double lambda_hi = std::numeric_limits<double>::infinity();

  std::complex<double> operator()(double lambda) const { return fn(lambda); }
  bool compact() const { return std::isfinite(lambda_hi); }
  bool may_be_nonzero(double lambda) const { return lambda >= lambda_lo && lambda <= lambda_hi; }
};

Symbol identity_symbol();
Symbol schrodinger_symbol(double t);       // e^{-i t lambda}
Symbol imaginary_power_symbol(double tau); // lambda^{i tau}
Symbol resolvent_symbol();                 // lambda / (1 + lambda)
Symbol band_symbol(const DyadicSystem& sys, int j);    // phi_j
Symbol dual_symbol(const DyadicSystem& sys, int j);    // psi_j
Symbol product_symbol(const DyadicSystem& sys, int j); // (phi psi)_j
Symbol operator*(const Symbol& a, const Symbol& b);

} // namespace barrier
