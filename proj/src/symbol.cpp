#include "barrier/symbol.hpp"

#include <algorithm>
#include <cmath>

namespace barrier {

Symbol identity_symbol() { return {[](double) { return std::complex<double>(1.0); }, "identity"}; }

Symbol schrodinger_symbol(double t) {
  return {[t](double lam) { return std::polar(1.0, -t * lam); }, "exp(-i t lambda), t=" + std::to_string(t)};
}

Symbol imaginary_power_symbol(double tau) {
  return {[tau](double lam) {
            if (lam <= 0.0) return std::complex<double>(0.0);
            return std::polar(1.0, tau * std::log(lam));
          },
          "lambda^(i tau), tau=" + std::to_string(tau)};
}

Symbol resolvent_symbol() {
  return {[](double lam) { return std::complex<double>(lam / (1.0 + lam)); }, "lambda/(1+lambda)"};
}

namespace {

Symbol dyadic_symbol(const DyadicSystem& sys, int j, int which, const char* tag) {
  Symbol s;
  s.fn = [sys, j, which](double lam) {
    double v = which == 0 ? sys.eval(j, lam) : which == 1 ? sys.eval_dual(j, lam) : sys.eval_product(j, lam);
    return std::complex<double>(v);
  };
  s.descriptor = std::string(tag) + "_" + std::to_string(j) + "[" + sys.family_id() + "]";
  s.lambda_lo = sys.band_lower(j);
  s.lambda_hi = sys.band_upper(j);
  return s;
}

} // namespace

Symbol band_symbol(const DyadicSystem& sys, int j) { return dyadic_symbol(sys, j, 0, "phi"); }
Symbol dual_symbol(const DyadicSystem& sys, int j) { return dyadic_symbol(sys, j, 1, "psi"); }
Symbol product_symbol(const DyadicSystem& sys, int j) { return dyadic_symbol(sys, j, 2, "phipsi"); }

Symbol operator*(const Symbol& a, const Symbol& b) {
  Symbol s;
  auto fa = a.fn, fb = b.fn;
  s.fn = [fa, fb](double lam) { return fa(lam) * fb(lam); };
  s.descriptor = a.descriptor + "*" + b.descriptor;
  s.lambda_lo = std::max(a.lambda_lo, b.lambda_lo);
  s.lambda_hi = std::min(a.lambda_hi, b.lambda_hi);
  return s;
}

} // namespace barrier
