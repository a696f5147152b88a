#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "barrier/eigen.hpp"
#include "barrier/grid.hpp"
#include "barrier/symbol.hpp"

namespace barrier {

using Vec = Eigen::VectorXcd;
using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Eigenfunction table E(m, i) = e(x_i, xi_m) for one spatial and one spectral
// grid. F f = (2 pi)^{-1/2} sum_i w_i f_i conj(E(m, i)),
// F* g = (2 pi)^{-1/2} sum_m w_m g_m E(m, i).
class SpectralBasis {
public:
  SpectralBasis(const BarrierPotential& pot, const SpatialGrid& grid, const SpectralGrid& sg, int threads = 1);

  const BarrierPotential& potential() const { return pot_; }
  const SpatialGrid& spatial() const { return grid_; }
  const SpectralGrid& spectral() const { return sg_; }
  const std::vector<double>& x() const { return x_; }
  int threads() const { return threads_; }

  // warns (does not throw) when f is not small near the grid ends
  Vec forward(const Vec& f, std::vector<std::string>* warnings = nullptr) const;
  Vec adjoint(const Vec& g) const;
  // adjoint evaluated at arbitrary points, eigenfunctions computed on the fly
  Vec adjoint_at(const Vec& g, const std::vector<double>& points) const;

  Vec symbol_values(const Symbol& m) const;
  Vec apply_symbol(const Symbol& m, const Vec& f) const;

  double spectral_l2(const Vec& g) const;
  double spatial_l2(const Vec& f) const;

private:
  BarrierPotential pot_;
  SpatialGrid grid_;
  SpectralGrid sg_;
  std::vector<double> x_, xw_;
  RowMatrix E_;
  int threads_;
};

Vec forward(const Vec& f, const SpatialGrid& grid, const SpectralGrid& sg, const BarrierPotential& pot);
Vec adjoint(const Vec& g, const SpatialGrid& grid, const SpectralGrid& sg, const BarrierPotential& pot);
Vec apply_symbol(const Symbol& m, const Vec& f, const SpatialGrid& grid, const SpectralGrid& sg,
                 const BarrierPotential& pot);

// true if |f| <= tol * max|f| on the outer 5% of the grid at each end
bool decays_at_boundary(const Vec& f, double tol = 1e-8);

enum class KernelDerivative { none, dx, dy };

struct KernelMatrix {
  std::vector<double> x, y;
  Eigen::MatrixXcd values; // values(i, k) = K(x_i, y_k)
  std::string symbol;
  std::uint64_t grid_hash = 0;
  KernelDerivative derivative = KernelDerivative::none;

  void write_csv(const std::string& path) const;
  // complex64 row-major (x index slow) plus <path>.json sidecar
  void write_binary(const std::string& path) const;
};

// K(x, y) = (1/2 pi) int m(xi^2) e(x, xi) conj(e(y, xi)) d xi by Gauss-Legendre
KernelMatrix kernel_matrix(const Symbol& m, const std::vector<double>& xs, const std::vector<double>& ys,
                           const SpectralGrid& sg, const BarrierPotential& pot,
                           KernelDerivative deriv = KernelDerivative::none, int threads = 1);

// Kernel columns K(x_n, y_k), x_n = x0 + n dx on [a, b], by plane-wave
// synthesis: trapezoid on a uniform xi grid (spacing 2 pi / P with
// P = period_factor (b - a)) summed with one FFT per region.
// The symbol must vanish smoothly at xi_lo and xi_hi.
struct KernelColumns {
  double x0 = 0.0, dx = 0.0;
  int n = 0;
  std::vector<Vec> cols;
  double point(int i) const { return x0 + i * dx; }
};

KernelColumns synthesize_kernel_columns(const Symbol& m, double xi_lo, double xi_hi, const std::vector<double>& ys,
                                        const BarrierPotential& pot, double a, double b, double dx,
                                        double period_factor = 2.0,
                                        KernelDerivative deriv = KernelDerivative::none);

} // namespace barrier
