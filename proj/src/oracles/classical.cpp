#include "barrier/oracles/classical.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

namespace barrier::oracle {

std::vector<BandNorm> classical_band_norms(const Eigen::VectorXcd& f, const SpatialGrid& grid, const DyadicSystem& sys,
                                           double p, int j_lo, int j_hi, const ClassicalOptions& opt) {
  if (opt.pad < 1) throw std::invalid_argument("pad must be >= 1");
  int n0 = grid.n;
  int n = opt.pad * (n0 - 1);
  double h = grid.h(), L = n * h;
  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_complex* spec = fftw_alloc_complex(n);
  fftw_complex* work = fftw_alloc_complex(n);
  fftw_plan fwd = fftw_plan_dft_1d(n, buf, spec, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_1d(n, work, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  // f sits at indices 0..n0-1, zeros after; with pad = 1 the last sample wraps onto the first
  for (int i = 0; i < n; ++i) buf[i][0] = buf[i][1] = 0.0;
  for (int i = 0; i < n0; ++i) {
    int k = i % n;
    buf[k][0] += f(i).real();
    buf[k][1] += f(i).imag();
  }
  fftw_execute(fwd);
  std::vector<BandNorm> out;
  for (int j = j_lo; j <= j_hi; ++j) {
    for (int k = 0; k < n; ++k) {
      int kk = k <= n / 2 ? k : k - n;
      double xi = 2.0 * std::numbers::pi * kk / L;
      double m = sys.eval(j, xi * xi) / n;
      work[k][0] = spec[k][0] * m;
      work[k][1] = spec[k][1] * m;
    }
    fftw_execute(bwd);
    double s = 0.0;
    auto add = [&](int i, double w) {
      double a = std::hypot(buf[i][0], buf[i][1]);
      s = std::isinf(p) ? std::max(s, a) : s + w * std::pow(a, p);
    };
    if (opt.window_only && opt.pad > 1)
      for (int i = 0; i < n0; ++i) add(i, (i == 0 || i == n0 - 1) ? 0.5 * h : h);
    else
      for (int i = 0; i < n; ++i) add(i, h);
    out.push_back({j, std::isinf(p) ? s : std::pow(s, 1.0 / p)});
  }
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  fftw_free(buf);
  fftw_free(spec);
  fftw_free(work);
  return out;
}

BesovResult classical_besov_norm(const Eigen::VectorXcd& f, const SpatialGrid& grid, const BesovParams& prm,
                                 const DyadicSystem& sys, int j_hi, const ClassicalOptions& opt) {
  int lo = prm.homogeneous ? prm.j_min : 0;
  return besov_from_bands(classical_band_norms(f, grid, sys, prm.p, lo, j_hi, opt), prm, sys.kind());
}

} // namespace barrier::oracle
