#include "barrier/eigen.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace barrier {

namespace {

constexpr cplx I(0.0, 1.0);
constexpr double kSeriesCut = 1e-4;
constexpr double kScaleCut = 20.0;

// sinh(z)/z, sin(z)/z for real z
double sinhc_r(double z) {
  if (std::abs(z) < 2 * kSeriesCut) {
    double z2 = z * z;
    return 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0 * (1.0 + z2 / 72.0 * (1.0 + z2 / 110.0))));
  }
  return std::sinh(z) / z;
}

double sinc_r(double z) {
  if (std::abs(z) < 2 * kSeriesCut) {
    double z2 = z * z;
    return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0 * (1.0 - z2 / 110.0))));
  }
  return std::sin(z) / z;
}

cplx expi(double t) { return {std::cos(t), std::sin(t)}; }

} // namespace

cplx sinhc(cplx z) {
  if (std::abs(z) < 2 * kSeriesCut) {
    cplx z2 = z * z;
    return 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0 * (1.0 + z2 / 72.0 * (1.0 + z2 / 110.0))));
  }
  return std::sinh(z) / z;
}

cplx cosh2m1_over_sq(cplx r) {
  if (std::abs(r) < kSeriesCut) {
    // sum_{k=1}^{6} 4^k r^{2k-2} / (2k)!
    cplx r2 = r * r, term = 2.0, sum = 0.0;
    for (int k = 1; k <= 6; ++k) {
      sum += term;
      term *= 4.0 * r2 / double((2 * k + 1) * (2 * k + 2));
    }
    return sum;
  }
  return (std::cosh(2.0 * r) - 1.0) / (r * r);
}

RhoValue rho(double xi, const BarrierPotential& pot) {
  double eps = pot.epsilon();
  double a = std::abs(xi);
  if (a > eps) return {cplx(0.0, std::sqrt((a - eps) * (a + eps))), Regime::oscillatory};
  return {cplx(std::sqrt((eps - a) * (eps + a)), 0.0), Regime::evanescent};
}

EigenMode::EigenMode(double xi, const BarrierPotential& pot) : xi_(xi) {
  co_.xi = xi;
  plus_ = xi >= 0.0;
  co_.sign = plus_ ? Branch::plus : Branch::minus;
  if (pot.is_free()) {
    free_ = true;
    co_.a = co_.c = 1.0;
    co_.a_prime = co_.c_prime = 0.0;
    co_.b = 1.0;
    co_.b_prime = 0.0;
    return;
  }
  double eps = pot.epsilon();
  RhoValue r = rho(xi, pot);
  regime_ = r.regime;
  double rho2, ch, sho;
  double sgn = plus_ ? 1.0 : -1.0;
  double damp = 1.0; // e^{-2 rho} in scaled mode
  if (regime_ == Regime::oscillatory) {
    k_ = r.value.imag();
    rho2 = -k_ * k_;
    ch = std::cos(2 * k_);
    sho = sinc_r(2 * k_);
  } else {
    k_ = r.value.real();
    rho2 = k_ * k_;
    if (k_ > kScaleCut) {
      scaled_ = true;
      double e4 = std::exp(-4 * k_);
      ch = 0.5 * (1 + e4);
      sho = (1 - e4) / (4 * k_);
      damp = std::exp(-2 * k_);
    } else {
      ch = std::cosh(2 * k_);
      sho = sinhc_r(2 * k_);
    }
  }
  // plus:  den = xi ch + i (rho^2 - xi^2) sho
  // minus: den = xi ch - i (rho^2 - xi^2) sho
  cplx den(xi * ch, sgn * (rho2 - xi * xi) * sho);
  cplx ph2 = expi(-2 * sgn * xi);                       // e^{-2 i xi} or e^{2 i xi}
  cplx amp = xi * ph2 / den;                             // C (plus) or A (minus), without damp
  cplx refl = -sgn * I * (eps * eps) * sho * ph2 / den;  // A' (plus) or C' (minus)
  pref_ = amp * expi(sgn * xi);

  cplx rc = regime_ == Regime::oscillatory ? cplx(0.0, k_) : cplx(k_, 0.0);
  cplx b, bp;
  if (std::abs(rc) == 0.0) {
    b = bp = cplx(std::numeric_limits<double>::infinity(), 0.0);
  } else if (scaled_) {
    if (plus_) {
      b = amp * (rc + I * xi) * std::exp(-3.0 * rc + I * xi) / (2.0 * rc);
      bp = amp * (rc - I * xi) * std::exp(-rc + I * xi) / (2.0 * rc);
    } else {
      b = amp * (rc + I * xi) * std::exp(-rc - I * xi) / (2.0 * rc);
      bp = amp * (rc - I * xi) * std::exp(-3.0 * rc - I * xi) / (2.0 * rc);
    }
  } else {
    if (plus_) {
      b = amp * (rc + I * xi) * std::exp(-rc + I * xi) / (2.0 * rc);
      bp = amp * (rc - I * xi) * std::exp(rc + I * xi) / (2.0 * rc);
    } else {
      b = amp * (rc + I * xi) * std::exp(rc - I * xi) / (2.0 * rc);
      bp = amp * (rc - I * xi) * std::exp(-rc - I * xi) / (2.0 * rc);
    }
  }
  co_.b = b;
  co_.b_prime = bp;
  if (plus_) {
    co_.a = 1.0;
    co_.a_prime = refl;
    co_.c = amp * damp;
    co_.c_prime = 0.0;
  } else {
    co_.a = amp * damp;
    co_.a_prime = 0.0;
    co_.c = 1.0;
    co_.c_prime = refl;
  }
}

void EigenMode::middle(double u, cplx& val, cplx& der) const {
  double c, sc, ps; // cosh(rho u), sinh(rho u)/rho, rho sinh(rho u)
  if (regime_ == Regime::oscillatory) {
    double s = std::sin(k_ * u);
    c = std::cos(k_ * u);
    sc = u * sinc_r(k_ * u);
    ps = -k_ * s;
  } else if (scaled_) {
    double ep = std::exp(k_ * (u - 2)), em = std::exp(-k_ * (u + 2));
    c = 0.5 * (ep + em);
    sc = 0.5 * (ep - em) / k_;
    ps = 0.5 * k_ * (ep - em);
  } else {
    c = std::cosh(k_ * u);
    sc = u * sinhc_r(k_ * u);
    ps = k_ * std::sinh(k_ * u);
  }
  if (plus_) {
    val = pref_ * cplx(c, -xi_ * sc);
    der = pref_ * cplx(-ps, xi_ * c);
  } else {
    val = pref_ * cplx(c, xi_ * sc);
    der = pref_ * cplx(ps, xi_ * c);
  }
}

cplx EigenMode::value(double x) const {
  if (free_) return expi(xi_ * x);
  if (x > 1.0) {
    if (plus_) return co_.c * expi(xi_ * x);
    return expi(xi_ * x) + co_.c_prime * expi(-xi_ * x);
  }
  if (x < -1.0) {
    if (plus_) return expi(xi_ * x) + co_.a_prime * expi(-xi_ * x);
    return co_.a * expi(xi_ * x);
  }
  cplx v, d;
  middle(plus_ ? 1.0 - x : 1.0 + x, v, d);
  return v;
}

cplx EigenMode::dx(double x) const {
  cplx ik(0.0, xi_);
  if (free_) return ik * expi(xi_ * x);
  if (x > 1.0) {
    if (plus_) return ik * co_.c * expi(xi_ * x);
    return ik * (expi(xi_ * x) - co_.c_prime * expi(-xi_ * x));
  }
  if (x < -1.0) {
    if (plus_) return ik * (expi(xi_ * x) - co_.a_prime * expi(-xi_ * x));
    return ik * co_.a * expi(xi_ * x);
  }
  cplx v, d;
  middle(plus_ ? 1.0 - x : 1.0 + x, v, d);
  return d;
}

double EigenMode::transmission() const {
  if (free_) return 1.0;
  return std::norm(plus_ ? co_.c : co_.a);
}

EigenCoefficients coefficients(double xi, const BarrierPotential& pot) {
  return EigenMode(xi, pot).coeffs();
}

cplx eval_eigenfunction(double x, double xi, const BarrierPotential& pot) {
  return EigenMode(xi, pot).value(x);
}

cplx eval_eigenfunction_dx(double x, double xi, const BarrierPotential& pot) {
  return EigenMode(xi, pot).dx(x);
}

double eigen_residual(double x, double xi, const BarrierPotential& pot, double h) {
  if (!pot.is_free() && (std::abs(x - 1.0) < 10 * h || std::abs(x + 1.0) < 10 * h))
    throw std::invalid_argument("eigen_residual: x too close to a barrier edge for the stencil");
  EigenMode m(xi, pot);
  cplx d2 = (-m.value(x + 2 * h) + 16.0 * m.value(x + h) - 30.0 * m.value(x) + 16.0 * m.value(x - h) -
             m.value(x - 2 * h)) /
            (12.0 * h * h);
  return std::abs(-d2 + (pot(x) - xi * xi) * m.value(x));
}

} // namespace barrier
