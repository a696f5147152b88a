#include "barrier/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "barrier/errors.hpp"
#include "barrier/quadrature.hpp"

namespace barrier {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
  auto p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

SpatialGrid::SpatialGrid(double lo, double hi, int count) : x_min(lo), x_max(hi), n(count) {
  if (!(hi > lo) || count < 2) throw std::invalid_argument("SpatialGrid: empty grid");
}

SpatialGrid SpatialGrid::symmetric(double half_width, int points_per_unit) {
  int cells = static_cast<int>(std::lround(2 * half_width * points_per_unit));
  return SpatialGrid(-half_width, half_width, cells + 1);
}

std::vector<double> SpatialGrid::points() const {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = point(i);
  return x;
}

std::vector<double> SpatialGrid::weights() const {
  std::vector<double> w(n, h());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double SpatialGrid::extent() const { return std::max(std::abs(x_min), std::abs(x_max)); }

SpatialGrid SpatialGrid::refined(int factor) const { return SpatialGrid(x_min, x_max, (n - 1) * factor + 1); }

void SpatialGrid::validate() const {
  if (x_min > -3.0 || x_max < 3.0) throw std::invalid_argument("SpatialGrid must cover [-3, 3]");
  if (n < 64) throw std::invalid_argument("SpatialGrid needs at least 64 points");
}

nlohmann::json SpatialGrid::to_json() const { return {{"x_min", x_min}, {"x_max", x_max}, {"n", n}}; }

int SpectralGrid::required_nodes(const Panel& p, double x_extent, double phase_time) {
  double w = p.hi - p.lo;
  double xmax = x_extent + 2.0;
  double xm = std::max(std::abs(p.lo), std::abs(p.hi));
  int n = 20 + static_cast<int>(std::ceil(10.0 * w * xmax / std::numbers::pi));
  if (phase_time != 0.0) n += static_cast<int>(std::ceil(std::abs(phase_time) * xm * xm / std::numbers::pi));
  return n;
}

SpectralGrid SpectralGrid::build(const BarrierPotential& pot, const SpectralGridOptions& opt) {
  if (!(opt.xi_max > opt.xi_min) || opt.xi_min < 0.0) throw std::invalid_argument("SpectralGrid: bad range");
  SpectralGrid g;
  g.opt_ = opt;
  std::vector<double> brk{opt.xi_min, opt.xi_max};
  double eps = pot.is_free() ? 0.0 : pot.epsilon();
  if (eps > opt.xi_min && eps < opt.xi_max) brk.push_back(eps);
  if (opt.dyadic_breaks)
    for (int k = -60; k <= 80; ++k) {
      double b = std::exp2(0.5 * k);
      if (b > opt.xi_min * (1 + 1e-12) && b < opt.xi_max * (1 - 1e-12)) brk.push_back(b);
    }
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end(), [](double a, double b) { return b - a <= 1e-12 * b; }), brk.end());
  std::vector<Panel> half;
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
    double a = brk[i], b = brk[i + 1];
    int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / opt.max_panel_width - 1e-12)));
    for (int k = 0; k < pieces; ++k) {
      Panel p{a + (b - a) * k / pieces, k + 1 == pieces ? b : a + (b - a) * (k + 1) / pieces, 0};
      p.nodes = static_cast<int>(std::ceil(opt.density * required_nodes(p, opt.x_extent, opt.phase_time)));
      half.push_back(p);
    }
  }
  for (auto it = half.rbegin(); it != half.rend(); ++it) g.panels_.push_back({-it->hi, -it->lo, it->nodes});
  for (const auto& p : half) g.panels_.push_back(p);
  for (const auto& p : g.panels_) {
    const GaussRule& r = gauss_legendre(p.nodes);
    double c = 0.5 * (p.lo + p.hi), s = 0.5 * (p.hi - p.lo);
    for (int i = 0; i < p.nodes; ++i) {
      g.nodes_.push_back(c + s * r.nodes[i]);
      g.weights_.push_back(s * r.weights[i]);
    }
  }
  return g;
}

bool SpectralGrid::excludes_origin() const {
  for (double x : nodes_)
    if (x == 0.0) return false;
  return true;
}

void SpectralGrid::check_resolution(double x_extent, double phase_time) const {
  for (const auto& p : panels_) {
    int need = required_nodes(p, x_extent, phase_time);
    if (p.nodes < need)
      throw ResolutionError("spectral panel [" + std::to_string(p.lo) + ", " + std::to_string(p.hi) + "] has " +
                            std::to_string(p.nodes) + " nodes, needs " + std::to_string(need));
  }
}

SpectralGrid SpectralGrid::refined(int factor, const BarrierPotential& pot) const {
  SpectralGridOptions o = opt_;
  o.density *= factor;
  return build(pot, o);
}

std::uint64_t SpectralGrid::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& p : panels_) {
    h = fnv1a(&p.lo, sizeof p.lo, h);
    h = fnv1a(&p.hi, sizeof p.hi, h);
    h = fnv1a(&p.nodes, sizeof p.nodes, h);
  }
  return h;
}

nlohmann::json SpectralGrid::to_json() const {
  return {{"dyadic_breaks", opt_.dyadic_breaks}, {"xi_max", opt_.xi_max},     {"xi_min", opt_.xi_min},   {"x_extent", opt_.x_extent},
          {"panel_width", opt_.max_panel_width}, {"phase_time", opt_.phase_time}, {"density", opt_.density},
          {"panels", panels_.size()}, {"nodes", nodes_.size()},  {"hash", hash()}};
}

} // namespace barrier
