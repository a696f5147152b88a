#include "barrier/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

#include "barrier/errors.hpp"
#include "barrier/parallel.hpp"

namespace barrier {

Vec propagate_transform(const Vec& Ff, double t, const SpectralBasis& basis) {
  const auto& xi = basis.spectral().nodes();
  Vec out(Ff.size());
  for (int m = 0; m < Ff.size(); ++m) out(m) = std::polar(1.0, -t * xi[m] * xi[m]) * Ff(m);
  return out;
}

Vec propagate_spectral(const Vec& f, double t, const SpectralBasis& basis) {
  const auto& sg = basis.spectral();
  sg.check_resolution(basis.spatial().extent(), std::abs(t));
  Vec F = basis.forward(f);
  double top = F.cwiseAbs().maxCoeff(), edge = 0.0;
  const auto& xi = sg.nodes();
  for (int m = 0; m < F.size(); ++m)
    if (std::abs(xi[m]) >= 0.95 * sg.xi_max()) edge = std::max(edge, std::abs(F(m)));
  if (top > 0.0 && edge > 1e-8 * top)
    throw ResolutionError("Ff is " + std::to_string(edge / top) + " of its maximum at the spectral grid edge");
  return basis.adjoint(propagate_transform(F, t, basis));
}

namespace {

// The implicit solve spreads exponentially small values over the whole FD
// domain; subnormal arithmetic on them is slower by two orders of magnitude.
class FlushDenormals {
public:
#if defined(__SSE2__)
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
  ~FlushDenormals() { _mm_setcsr(saved_); }

private:
  unsigned saved_;
#endif
};

// one Crank-Nicolson run with a fixed number of steps
struct CnRun {
  std::vector<cplx> psi;
  double max_step_drift = 0.0;
};

CnRun crank_nicolson(std::vector<cplx> psi, const std::vector<double>& V, double h, double t, int steps) {
  int n = static_cast<int>(psi.size());
  double dt = t / steps;
  cplx off(0.0, -0.5 * dt / (h * h)); // i dt/2 * (-1/h^2)
  std::vector<cplx> diag(n), cp(n), rhs(n);
  for (int k = 0; k < n; ++k) diag[k] = cplx(1.0, 0.5 * dt * (2.0 / (h * h) + V[k]));
  // Thomas factorization of the constant left-hand matrix
  std::vector<cplx> inv(n);
  inv[0] = 1.0 / diag[0];
  cp[0] = off * inv[0];
  for (int k = 1; k < n; ++k) {
    inv[k] = 1.0 / (diag[k] - off * cp[k - 1]);
    cp[k] = off * inv[k];
  }
  const cplx half_dt(0.0, 0.5 * dt);
  const double ih2 = 1.0 / (h * h);
  auto norm2 = [&](const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s;
  };
  FlushDenormals ftz;
  CnRun run;
  double prev = norm2(psi);
  for (int s = 0; s < steps; ++s) {
    for (int k = 0; k < n; ++k) {
      cplx lap = 2.0 * psi[k] - (k > 0 ? psi[k - 1] : 0.0) - (k + 1 < n ? psi[k + 1] : 0.0);
      rhs[k] = psi[k] - half_dt * (lap * ih2 + V[k] * psi[k]);
    }
    psi[0] = rhs[0] * inv[0];
    for (int k = 1; k < n; ++k) psi[k] = (rhs[k] - off * psi[k - 1]) * inv[k];
    for (int k = n - 2; k >= 0; --k) psi[k] -= cp[k] * psi[k + 1];
    double cur = norm2(psi);
    if (prev > 0.0) run.max_step_drift = std::max(run.max_step_drift, std::abs(std::sqrt(cur / prev) - 1.0));
    prev = cur;
  }
  run.psi = std::move(psi);
  return run;
}

} // namespace

FdResult propagate_fd(const TestFunction& f, double t, const SpatialGrid& grid, const BarrierPotential& pot,
                      const FdOptions& opt) {
  if (opt.refine < 1 || !(opt.dt > 0.0) || opt.extent_factor < 1.0) throw std::invalid_argument("bad FD options");
  if (t < 0.0) throw std::invalid_argument("FD propagation needs t >= 0");
  double h = grid.h() / opt.refine;
  double E = opt.extent_factor * grid.extent();
  int pad = static_cast<int>(std::ceil((grid.x_min + E) / h));
  int n = pad + (grid.n - 1) * opt.refine + 1 + static_cast<int>(std::ceil((E - grid.x_max) / h));
  double x0 = grid.x_min - pad * h;
  double eps2 = pot.is_free() ? 0.0 : pot.epsilon() * pot.epsilon();
  std::vector<double> V(n);
  std::vector<cplx> psi0(n);
  for (int k = 0; k < n; ++k) {
    double x = x0 + k * h, d = std::abs(std::abs(x) - 1.0);
    V[k] = d < 1e-9 ? 0.5 * eps2 : std::abs(x) < 1.0 ? eps2 : 0.0;
    psi0[k] = f.fn(x);
  }
  FdResult r;
  std::vector<cplx> psi;
  if (t == 0.0) psi = psi0;
  else {
    int steps = std::max(1, static_cast<int>(std::ceil(t / opt.dt)));
    auto coarse = crank_nicolson(psi0, V, h, t, steps);
    r.steps = steps;
    r.max_step_drift = coarse.max_step_drift;
    psi = coarse.psi;
    if (opt.richardson) {
      auto fine = crank_nicolson(psi0, V, h, t, 2 * steps);
      r.steps += 2 * steps;
      r.max_step_drift = std::max(r.max_step_drift, fine.max_step_drift);
      for (int k = 0; k < n; ++k) psi[k] = (4.0 * fine.psi[k] - coarse.psi[k]) / 3.0;
    }
  }
  double n0 = 0.0, n1 = 0.0, top = 0.0, edge = 0.0;
  int band = std::max(1, n / 20);
  for (int k = 0; k < n; ++k) {
    n0 += std::norm(psi0[k]);
    n1 += std::norm(psi[k]);
    top = std::max(top, std::abs(psi[k]));
    if (k < band || k >= n - band) edge = std::max(edge, std::abs(psi[k]));
  }
  r.l2_drift = n0 > 0.0 ? std::abs(std::sqrt(n1 / n0) - 1.0) : 0.0;
  r.boundary_warning = edge > 1e-6 * top;
  r.psi.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) r.psi(i) = psi[pad + i * opt.refine];
  return r;
}

nlohmann::json EvolutionRun::to_json() const {
  return {{"t", t}, {"method", method}, {"dt", dt}, {"conserved_l2_drift", conserved_l2_drift},
          {"boundary_warning", boundary_warning}};
}

double japanese_bracket(double t) { return std::sqrt(1.0 + t * t); }

namespace {

struct SmoothingNorms {
  BesovParams num, den;
};

SmoothingNorms smoothing_params(double alpha, double p, double q, const DyadicSystem& sys) {
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("smoothing ratio needs 1 <= p < inf");
  if (!(q >= 1.0)) throw std::invalid_argument("smoothing ratio needs q >= 1");
  double beta = std::abs(0.5 - 1.0 / p);
  if (!(alpha > 0.0 && alpha < 2.0 - 2.0 * beta)) throw std::invalid_argument("need 0 < alpha < 2 - 2 beta");
  bool hom = sys.kind() == SystemKind::homogeneous;
  SmoothingNorms n;
  n.num = {.alpha = 0.5 * alpha, .p = p, .q = q, .homogeneous = hom, .j_min = sys.j_min()};
  n.den = n.num;
  n.den.alpha = 0.5 * alpha + beta;
  return n;
}

std::vector<double> denominators(const std::vector<Vec>& transforms, const BesovParams& den, const DyadicSystem& sys,
                                 const SpectralBasis& basis) {
  std::vector<double> d(transforms.size());
  parallel_for(static_cast<int>(transforms.size()), basis.threads(), [&](int i) {
    d[i] = besov_norm(BandDecomposition(sys, basis, transforms[i]), den).total;
  });
  return d;
}

double max_ratio(const std::vector<Vec>& transforms, const std::vector<double>& den, double t, const BesovParams& num,
                 const DyadicSystem& sys, const SpectralBasis& basis, int* worst) {
  int count = static_cast<int>(transforms.size());
  std::vector<double> r(count);
  parallel_for(count, basis.threads(), [&](int i) {
    BandDecomposition dt(sys, basis, propagate_transform(transforms[i], t, basis));
    r[i] = besov_norm(dt, num).total / den[i];
  });
  int w = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
  if (worst) *worst = w;
  return r[w];
}

} // namespace

double smoothing_ratio(const std::vector<Vec>& transforms, double t, double alpha, double p, double q,
                       const DyadicSystem& sys, const SpectralBasis& basis, int* worst) {
  if (transforms.empty()) throw std::invalid_argument("empty family");
  auto prm = smoothing_params(alpha, p, q, sys);
  return max_ratio(transforms, denominators(transforms, prm.den, sys, basis), t, prm.num, sys, basis, worst);
}

nlohmann::json SmoothingSweep::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& x : points) pts.push_back({{"t", x.t}, {"ratio", x.ratio}, {"worst", x.worst}});
  nlohmann::json j = {{"alpha", alpha}, {"p", p}, {"beta", beta}, {"points", pts}, {"slope", slope}};
  j["q"] = std::isinf(q) ? nlohmann::json("inf") : nlohmann::json(q);
  return j;
}

SmoothingSweep smoothing_sweep(const std::vector<Vec>& transforms, const std::vector<double>& ts, double alpha,
                               double p, double q, const DyadicSystem& sys, const SpectralBasis& basis) {
  SmoothingSweep s;
  s.alpha = alpha;
  s.p = p;
  s.q = q;
  s.beta = std::abs(0.5 - 1.0 / p);
  if (transforms.empty()) throw std::invalid_argument("empty family");
  auto prm = smoothing_params(alpha, p, q, sys);
  auto den = denominators(transforms, prm.den, sys, basis);
  for (double t : ts) {
    SmoothingPoint pt{t, 0.0, -1};
    pt.ratio = max_ratio(transforms, den, t, prm.num, sys, basis, &pt.worst);
    s.points.push_back(pt);
  }
  if (s.points.size() >= 2) {
    double mx = 0, my = 0;
    for (const auto& pt : s.points) {
      mx += std::log(japanese_bracket(pt.t));
      my += std::log(pt.ratio);
    }
    mx /= s.points.size();
    my /= s.points.size();
    double sxy = 0, sxx = 0;
    for (const auto& pt : s.points) {
      double dx = std::log(japanese_bracket(pt.t)) - mx;
      sxy += dx * (std::log(pt.ratio) - my);
      sxx += dx * dx;
    }
    s.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return s;
}

} // namespace barrier
