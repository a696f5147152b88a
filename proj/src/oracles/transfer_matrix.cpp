#include "barrier/oracles/transfer_matrix.hpp"

#include <Eigen/Dense>

namespace barrier::oracle {

namespace {

using C = std::complex<double>;
using M2 = Eigen::Matrix2cd;

// columns: e^{ikx}, e^{-ikx}; rows: value, derivative
M2 wave(C k, double x) {
  const C I(0, 1);
  M2 m;
  m << std::exp(I * k * x), std::exp(-I * k * x), I * k * std::exp(I * k * x), -I * k * std::exp(-I * k * x);
  return m;
}

} // namespace

TransferCoefficients transfer_matrix(double xi, double epsilon) {
  C kin = std::sqrt(C(xi * xi - epsilon * epsilon, 0.0));
  C kout(xi, 0.0);
  // coefficients left of the barrier = T * coefficients right of it
  M2 inside_from_right = wave(kin, 1.0).inverse() * wave(kout, 1.0);
  M2 left_from_inside = wave(kout, -1.0).inverse() * wave(kin, -1.0);
  M2 T = left_from_inside * inside_from_right;
  TransferCoefficients r;
  r.k_inside = kin;
  Eigen::Vector2cd right, inside;
  if (xi > 0) {
    // right (c, 0), left (1, a')
    C c = 1.0 / T(0, 0);
    right << c, 0.0;
    r.c = c;
    r.c_prime = 0.0;
    r.a = 1.0;
    r.a_prime = T(1, 0) * c;
    inside = inside_from_right * right;
  } else {
    // propagate left to right: left (a, 0), right (1, c')
    M2 inside_from_left = wave(kin, -1.0).inverse() * wave(kout, -1.0);
    M2 R = wave(kout, 1.0).inverse() * wave(kin, 1.0) * inside_from_left;
    C a = 1.0 / R(0, 0);
    Eigen::Vector2cd left;
    left << a, 0.0;
    r.a = a;
    r.a_prime = 0.0;
    r.c = 1.0;
    r.c_prime = R(1, 0) * a;
    inside = inside_from_left * left;
  }
  r.in_plus = inside(0);
  r.in_minus = inside(1);
  return r;
}

} // namespace barrier::oracle
