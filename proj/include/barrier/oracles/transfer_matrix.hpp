#pragma once

#include <complex>

namespace barrier::oracle {

// Scattering coefficients from 2x2 interface matching, written against the
// plane-wave basis e^{+-ikx} in every region (k inside = sqrt(xi^2 - eps^2),
// principal branch). Shares no code with the closed-form coefficients.
struct TransferCoefficients {
  std::complex<double> a, a_prime, c, c_prime;
  std::complex<double> in_plus, in_minus; // inside amplitudes of e^{ik x}, e^{-ik x}
  std::complex<double> k_inside;
};

TransferCoefficients transfer_matrix(double xi, double epsilon);

} // namespace barrier::oracle
