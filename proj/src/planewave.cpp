#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

#include "barrier/transform.hpp"

namespace barrier {

namespace {

// FFTW planning is not thread safe
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

int fft_size(double need) {
  long n = 16;
  while (n < need) n *= 2;
  // 3 * 2^k is often closer than the next power of two
  if (n / 4 * 3 >= need && n >= 64) n = n / 4 * 3;
  if (n > (1L << 26)) throw std::length_error("plane-wave synthesis needs an FFT larger than 2^26");
  return static_cast<int>(n);
}

// bins of one plane-wave sum, sum_k c_k e^{i k dk x}, read back on x0 + n dx
class WaveSum {
public:
  WaveSum(int n, double dk, double x0) : n_(n), dk_(dk), x0_(x0) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    plan_ = fftw_plan_dft_1d(n, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
    clear();
  }
  ~WaveSum() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  WaveSum(const WaveSum&) = delete;
  WaveSum& operator=(const WaveSum&) = delete;

  void clear() {
    for (int i = 0; i < n_; ++i) in_[i][0] = in_[i][1] = 0.0;
  }
  // coefficient of e^{i k dk x}; with d/dx on, of its x derivative
  void add(long k, cplx c) {
    if (ddx_) c *= cplx(0.0, k * dk_);
    c *= std::polar(1.0, k * dk_ * x0_);
    long b = ((k % n_) + n_) % n_;
    in_[b][0] += c.real();
    in_[b][1] += c.imag();
  }
  void run() { fftw_execute(plan_); }
  void set_ddx(bool on) { ddx_ = on; }
  cplx at(int i) const { return {out_[i][0], out_[i][1]}; }

private:
  int n_;
  double dk_, x0_;
  bool ddx_ = false;
  fftw_complex *in_, *out_;
  fftw_plan plan_;
};

} // namespace

KernelColumns synthesize_kernel_columns(const Symbol& m, double xi_lo, double xi_hi, const std::vector<double>& ys,
                                        const BarrierPotential& pot, double a, double b, double dx,
                                        double period_factor, KernelDerivative deriv) {
  if (!(b > a) || !(dx > 0) || !(xi_hi > xi_lo) || xi_lo < 0 || period_factor < 1.0)
    throw std::invalid_argument("synthesize_kernel_columns: bad window or band");
  const double P = period_factor * (b - a);
  const int N = fft_size(P / dx);
  KernelColumns out;
  out.x0 = a;
  out.dx = P / N;
  out.n = std::min(N, static_cast<int>(std::floor((b - a) / out.dx)) + 1);
  const double dk = 2.0 * std::numbers::pi / P;
  const double pref = dk / (2.0 * std::numbers::pi);

  long k_lo = static_cast<long>(std::ceil(xi_lo / dk)), k_hi = static_cast<long>(std::floor(xi_hi / dk));
  if (k_lo == 0) k_lo = 1;
  // uniform samples of +-xi with their modes and symbol values
  struct Sample {
    long k;
    EigenMode mode;
  };
  std::vector<Sample> samples;
  for (long k = k_lo; k <= k_hi; ++k) {
    double xi = k * dk;
    if (m(xi * xi) == cplx(0.0)) continue;
    samples.push_back({k, EigenMode(xi, pot)});
    samples.push_back({-k, EigenMode(-xi, pot)});
  }

  bool free = pot.is_free();
  double eps = free ? 0.0 : pot.epsilon();
  bool need_right = free || b > 1.0, need_left = !free && a < -1.0, need_mid = !free && a <= 1.0 && b >= -1.0;
  bool mid_fft = need_mid && xi_lo > eps * (1.0 + 1e-6);

  // middle region samples in kappa = sqrt(xi^2 - eps^2)
  struct KSample {
    long q;
    EigenMode mode;
    double jac;
  };
  std::vector<KSample> ksamples;
  if (mid_fft) {
    double klo = std::sqrt((xi_lo - eps) * (xi_lo + eps)), khi = std::sqrt((xi_hi - eps) * (xi_hi + eps));
    long q_lo = std::max(1L, static_cast<long>(std::ceil(klo / dk))), q_hi = static_cast<long>(std::floor(khi / dk));
    for (long q = q_lo; q <= q_hi; ++q) {
      double kap = q * dk, xi = std::sqrt(kap * kap + eps * eps);
      if (m(xi * xi) == cplx(0.0)) continue;
      ksamples.push_back({q, EigenMode(xi, pot), kap / xi});
      ksamples.push_back({-q, EigenMode(-xi, pot), kap / xi});
    }
  }

  // indices of output points per region
  std::vector<int> mid_idx;
  for (int i = 0; i < out.n; ++i) {
    double x = out.point(i);
    if (need_mid && std::abs(x) <= 1.0) mid_idx.push_back(i);
  }

  bool ddx = deriv == KernelDerivative::dx, ddy = deriv == KernelDerivative::dy;
  auto ey = [&](const EigenMode& md, double y) { return std::conj(ddy ? md.dx(y) : md.value(y)); };
  WaveSum ws(N, dk, a);
  ws.set_ddx(ddx);
  for (double y : ys) {
    Vec col = Vec::Zero(out.n);
    // conj e(y, xi) m(xi^2) dk / 2pi per sample
    std::vector<cplx> wgt(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
      double xi = samples[s].mode.xi();
      wgt[s] = pref * m(xi * xi) * ey(samples[s].mode, y);
    }
    if (need_right) {
      ws.clear();
      for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& co = samples[s].mode.coeffs();
        long k = samples[s].k;
        if (free) ws.add(k, wgt[s]);
        else if (k > 0) ws.add(k, wgt[s] * co.c);
        else {
          ws.add(k, wgt[s]);
          ws.add(-k, wgt[s] * co.c_prime);
        }
      }
      ws.run();
      for (int i = 0; i < out.n; ++i)
        if (free || out.point(i) > 1.0) col(i) = ws.at(i);
    }
    if (need_left) {
      ws.clear();
      for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& co = samples[s].mode.coeffs();
        long k = samples[s].k;
        if (k > 0) {
          ws.add(k, wgt[s]);
          ws.add(-k, wgt[s] * co.a_prime);
        } else ws.add(k, wgt[s] * co.a);
      }
      ws.run();
      for (int i = 0; i < out.n; ++i)
        if (out.point(i) < -1.0) col(i) = ws.at(i);
    }
    if (need_mid && !mid_idx.empty()) {
      if (mid_fft) {
        ws.clear();
        for (const auto& ks : ksamples) {
          double xi = ks.mode.xi(), kap = std::abs(ks.q) * dk;
          const auto& co = ks.mode.coeffs();
          cplx w = pref * ks.jac * m(xi * xi) * ey(ks.mode, y);
          long q = std::abs(ks.q);
          cplx eK = std::polar(1.0, kap);
          if (xi > 0) {
            cplx pf = w * co.c * std::polar(1.0, xi);
            ws.add(q, pf * 0.5 * (1.0 + xi / kap) / eK);
            ws.add(-q, pf * 0.5 * (1.0 - xi / kap) * eK);
          } else {
            cplx pf = w * co.a * std::polar(1.0, -xi);
            ws.add(q, pf * 0.5 * (1.0 + xi / kap) * eK);
            ws.add(-q, pf * 0.5 * (1.0 - xi / kap) / eK);
          }
        }
        ws.run();
        for (int i : mid_idx) col(i) = ws.at(i);
      } else {
        for (int i : mid_idx) {
          double x = out.point(i);
          cplx s = 0.0;
          for (std::size_t k = 0; k < samples.size(); ++k)
            s += wgt[k] * (ddx ? samples[k].mode.dx(x) : samples[k].mode.value(x));
          col(i) = s;
        }
      }
    }
    out.cols.push_back(std::move(col));
  }
  return out;
}

} // namespace barrier
