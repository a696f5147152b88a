#include "barrier/transform.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "barrier/errors.hpp"
#include "barrier/parallel.hpp"

namespace barrier {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

} // namespace

SpectralBasis::SpectralBasis(const BarrierPotential& pot, const SpatialGrid& grid, const SpectralGrid& sg,
                             int threads)
    : pot_(pot), grid_(grid), sg_(sg), threads_(std::max(1, threads)) {
  sg_.check_resolution(grid_.extent(), sg_.options().phase_time);
  x_ = grid_.points();
  xw_ = grid_.weights();
  const auto& xi = sg_.nodes();
  int M = sg_.size(), N = grid_.n;
  E_.resize(M, N);
  parallel_for(M, threads_, [&](int m) {
    EigenMode mode(xi[m], pot_);
    for (int i = 0; i < N; ++i) E_(m, i) = mode.value(x_[i]);
  });
}

Vec SpectralBasis::forward(const Vec& f, std::vector<std::string>* warnings) const {
  if (f.size() != grid_.n) throw std::invalid_argument("forward: sample count does not match grid");
  if (warnings && !decays_at_boundary(f)) warnings->push_back("input does not decay at the spatial grid ends");
  Vec v(grid_.n);
  for (int i = 0; i < grid_.n; ++i) v(i) = xw_[i] * kInvSqrt2Pi * f(i);
  return E_.conjugate() * v;
}

Vec SpectralBasis::adjoint(const Vec& g) const {
  if (g.size() != sg_.size()) throw std::invalid_argument("adjoint: sample count does not match spectral grid");
  const auto& w = sg_.weights();
  Vec wg(g.size());
  for (int m = 0; m < g.size(); ++m) wg(m) = w[m] * kInvSqrt2Pi * g(m);
  Vec out = Vec::Zero(grid_.n);
  // band-limited inputs are zero outside a few runs of nodes
  int m = 0, M = static_cast<int>(g.size());
  while (m < M) {
    if (wg(m) == cplx(0.0)) {
      ++m;
      continue;
    }
    int e = m;
    while (e < M && wg(e) != cplx(0.0)) ++e;
    out.noalias() += E_.middleRows(m, e - m).transpose() * wg.segment(m, e - m);
    m = e;
  }
  return out;
}

Vec SpectralBasis::adjoint_at(const Vec& g, const std::vector<double>& points) const {
  const auto& w = sg_.weights();
  const auto& xi = sg_.nodes();
  double ext = 0.0;
  for (double p : points) ext = std::max(ext, std::abs(p));
  sg_.check_resolution(ext, sg_.options().phase_time);
  std::vector<int> active;
  for (int m = 0; m < sg_.size(); ++m)
    if (g(m) != cplx(0.0)) active.push_back(m);
  int P = static_cast<int>(points.size());
  Vec out = Vec::Zero(P);
  std::vector<EigenMode> modes;
  modes.reserve(active.size());
  for (int m : active) modes.emplace_back(xi[m], pot_);
  parallel_for(P, threads_, [&](int i) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) s += (w[active[k]] * g(active[k])) * modes[k].value(points[i]);
    out(i) = s * kInvSqrt2Pi;
  });
  return out;
}

Vec SpectralBasis::symbol_values(const Symbol& m) const {
  const auto& xi = sg_.nodes();
  Vec s(sg_.size());
  for (int k = 0; k < sg_.size(); ++k) {
    double lam = xi[k] * xi[k];
    s(k) = m.may_be_nonzero(lam) ? m(lam) : cplx(0.0);
  }
  return s;
}

Vec SpectralBasis::apply_symbol(const Symbol& m, const Vec& f) const {
  return adjoint(symbol_values(m).cwiseProduct(forward(f)));
}

double SpectralBasis::spectral_l2(const Vec& g) const {
  const auto& w = sg_.weights();
  double s = 0.0;
  for (int m = 0; m < sg_.size(); ++m) s += w[m] * std::norm(g(m));
  return std::sqrt(s);
}

double SpectralBasis::spatial_l2(const Vec& f) const {
  double s = 0.0;
  for (int i = 0; i < grid_.n; ++i) s += xw_[i] * std::norm(f(i));
  return std::sqrt(s);
}

Vec forward(const Vec& f, const SpatialGrid& grid, const SpectralGrid& sg, const BarrierPotential& pot) {
  return SpectralBasis(pot, grid, sg).forward(f);
}

Vec adjoint(const Vec& g, const SpatialGrid& grid, const SpectralGrid& sg, const BarrierPotential& pot) {
  return SpectralBasis(pot, grid, sg).adjoint(g);
}

Vec apply_symbol(const Symbol& m, const Vec& f, const SpatialGrid& grid, const SpectralGrid& sg,
                 const BarrierPotential& pot) {
  return SpectralBasis(pot, grid, sg).apply_symbol(m, f);
}

bool decays_at_boundary(const Vec& f, double tol) {
  int n = static_cast<int>(f.size());
  double peak = f.cwiseAbs().maxCoeff();
  int edge = std::max(1, n / 20);
  for (int i = 0; i < edge; ++i)
    if (std::abs(f(i)) > tol * peak || std::abs(f(n - 1 - i)) > tol * peak) return false;
  return true;
}

// ---------------------------------------------------------------------------
// kernels

KernelMatrix kernel_matrix(const Symbol& m, const std::vector<double>& xs, const std::vector<double>& ys,
                           const SpectralGrid& sg, const BarrierPotential& pot, KernelDerivative deriv,
                           int threads) {
  double ext = 0.0;
  for (double v : xs) ext = std::max(ext, std::abs(v));
  for (double v : ys) ext = std::max(ext, std::abs(v));
  sg.check_resolution(ext);
  double top = sg.xi_max() * sg.xi_max();
  bool outside = false;
  if (!(m.lambda_hi <= top * (1 + 1e-12))) {
    double hi = m.compact() ? m.lambda_hi : 4.0 * top;
    for (int i = 0; i <= 256 && !outside; ++i) outside = std::abs(m(top + (hi - top) * i / 256.0)) > 1e-10;
  }
  if (outside) throw std::domain_error("kernel symbol is not supported inside the spectral grid coverage");
  double bottom = sg.options().xi_min * sg.options().xi_min;
  if (bottom > 0.0 && m.lambda_lo < bottom * (1 - 1e-12) && std::abs(m(bottom)) > 1e-10)
    throw std::domain_error("kernel symbol extends below the spectral grid coverage");

  const auto& xi = sg.nodes();
  const auto& w = sg.weights();
  std::vector<int> act;
  std::vector<cplx> ws;
  for (int k = 0; k < sg.size(); ++k) {
    double lam = xi[k] * xi[k];
    if (!m.may_be_nonzero(lam)) continue;
    cplx v = m(lam);
    if (v == cplx(0.0)) continue;
    act.push_back(k);
    ws.push_back(w[k] * v / (2.0 * std::numbers::pi));
  }
  int M = static_cast<int>(act.size()), nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  RowMatrix A(nx, M), B(M, ny);
  parallel_for(M, threads, [&](int q) {
    EigenMode mode(xi[act[q]], pot);
    for (int i = 0; i < nx; ++i)
      A(i, q) = ws[q] * (deriv == KernelDerivative::dx ? mode.dx(xs[i]) : mode.value(xs[i]));
    for (int k = 0; k < ny; ++k)
      B(q, k) = std::conj(deriv == KernelDerivative::dy ? mode.dx(ys[k]) : mode.value(ys[k]));
  });
  KernelMatrix K;
  K.x = xs;
  K.y = ys;
  K.symbol = m.descriptor;
  K.grid_hash = sg.hash();
  K.derivative = deriv;
  K.values.resize(nx, ny);
  if (M == 0) {
    K.values.setZero();
    return K;
  }
  parallel_for(nx, threads, [&](int i) { K.values.row(i) = A.row(i) * B; });
  return K;
}

void KernelMatrix::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "x,y,re,im\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < y.size(); ++k)
      out << x[i] << ',' << y[k] << ',' << values(i, k).real() << ',' << values(i, k).imag() << '\n';
}

void KernelMatrix::write_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < y.size(); ++k) {
      float re = static_cast<float>(values(i, k).real()), im = static_cast<float>(values(i, k).imag());
      out.write(reinterpret_cast<const char*>(&re), sizeof re);
      out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  const char* dn[] = {"none", "dx", "dy"};
  nlohmann::json side = {{"rows", x.size()},   {"cols", y.size()},        {"dtype", "complex64"},
                         {"layout", "row-major, row = x index"},       {"x", x},
                         {"y", y},             {"symbol", symbol},        {"grid_hash", grid_hash},
                         {"derivative", dn[static_cast<int>(derivative)]}};
  std::ofstream js(path + ".json");
  js << side.dump(2) << '\n';
}

} // namespace barrier
