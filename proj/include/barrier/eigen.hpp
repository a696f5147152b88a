#pragma once

#include <complex>

#include "barrier/potential.hpp"

namespace barrier {

using cplx = std::complex<double>;

enum class Regime { oscillatory, evanescent };
enum class Branch { plus, minus };

struct RhoValue {
  cplx value;   // i K above the barrier, real below
  Regime regime;
};

RhoValue rho(double xi, const BarrierPotential& pot);

// e(x, xi) = a e^{i xi x} + a' e^{-i xi x}   for x < -1
//          = b e^{rho x} + b' e^{-rho x}      for |x| <= 1
//          = c e^{i xi x} + c' e^{-i xi x}    for x > 1
// b and b' diverge like 1/rho at |xi| = epsilon; evaluation never uses them.
struct EigenCoefficients {
  double xi = 0.0;
  Branch sign = Branch::plus;
  cplx a, a_prime, b, b_prime, c, c_prime;
};

EigenCoefficients coefficients(double xi, const BarrierPotential& pot);

// sinh(z)/z and (cosh(2 rho) - 1)/rho^2 with Taylor branches near zero
cplx sinhc(cplx z);
cplx cosh2m1_over_sq(cplx r);

// Everything needed to evaluate e(., xi) at many x for one fixed xi.
class EigenMode {
public:
  EigenMode(double xi, const BarrierPotential& pot);

  cplx value(double x) const;
  cplx dx(double x) const;

  double xi() const { return xi_; }
  const EigenCoefficients& coeffs() const { return co_; }

  // transmission |C|^2 for xi>0, |A|^2 for xi<0
  double transmission() const;

private:
  // middle region, u = 1 - x (plus) or 1 + x (minus)
  void middle(double u, cplx& val, cplx& der) const;

  double xi_ = 0.0;
  bool free_ = false;
  bool plus_ = true;
  Regime regime_ = Regime::oscillatory;
  double k_ = 0.0;      // K (oscillatory) or rho (evanescent)
  bool scaled_ = false; // rho > 20: prefactor carries e^{-2 rho} implicitly
  cplx pref_;           // C e^{i xi} (plus) or A e^{-i xi} (minus), unscaled part
  EigenCoefficients co_;
};

cplx eval_eigenfunction(double x, double xi, const BarrierPotential& pot);
cplx eval_eigenfunction_dx(double x, double xi, const BarrierPotential& pot);

// |(-d^2/dx^2 + V - xi^2) e| by a five point stencil with step h.
// Throws std::invalid_argument if x is within 10 h of +-1.
double eigen_residual(double x, double xi, const BarrierPotential& pot, double h = 1e-3);

} // namespace barrier
