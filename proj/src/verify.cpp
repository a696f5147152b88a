#include "barrier/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "barrier/parallel.hpp"

namespace barrier {

const char* to_string(DecayRegime r) {
  switch (r) {
  case DecayRegime::high: return "high";
  case DecayRegime::low: return "low";
  case DecayRegime::local: return "local";
  }
  return "?";
}

namespace {

struct KernelBand {
  Symbol m;
  double xi_lo, xi_hi, scale;
};

KernelBand decay_band(int j, DecayRegime regime, const std::string& family, int order) {
  if (regime == DecayRegime::local) {
    auto sys = build_system(SystemKind::inhomogeneous, family, order);
    return {band_symbol(sys, 0), 0.0, std::sqrt(sys.band_upper(0)), 1.0};
  }
  auto sys = build_system(SystemKind::homogeneous, family, order);
  return {band_symbol(sys, j), std::sqrt(sys.band_lower(j)), std::sqrt(sys.band_upper(j)), std::exp2(-0.5 * j)};
}

int shift_count(int n) { return std::max(1, static_cast<int>(std::ceil(n / 4.0))); }

// sum over l = 0..L and both signs of P (1 + a |x +- y +- 2l|)^{-n}
double envelope(double x, double y, double a, double P, int n, int L) {
  double s = 0.0;
  for (int l = 0; l <= L; ++l)
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) {
        if (l == 0 && s2 < 0) continue;
        s += P * std::pow(1.0 + a * std::abs(x + s1 * y + s2 * 2.0 * l), -n);
      }
  return s;
}

std::vector<double> predicted_peaks(double y, int L) {
  std::vector<double> p;
  for (int l = 0; l <= L; ++l)
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) p.push_back(s1 * y + s2 * 2.0 * l);
  return p;
}

double nearest(const std::vector<double>& pts, double x) {
  double best = pts.front();
  for (double p : pts)
    if (std::abs(p - x) < std::abs(best - x)) best = p;
  return best;
}

KernelColumns columns(const Symbol& m, double xi_lo, double xi_hi, const std::vector<double>& ys,
                      const BarrierPotential& pot, double a, double b, double dx, double pf, KernelDerivative d,
                      int threads) {
  std::vector<KernelColumns> parts(ys.size());
  parallel_for(static_cast<int>(ys.size()), threads, [&](int k) {
    parts[k] = synthesize_kernel_columns(m, xi_lo, xi_hi, {ys[k]}, pot, a, b, dx, pf, d);
  });
  KernelColumns out = parts.front();
  out.cols.clear();
  for (auto& p : parts) out.cols.push_back(std::move(p.cols.front()));
  return out;
}

DecayFitReport run_fit(int j, int n, DecayRegime regime, bool deriv, const BarrierPotential& pot,
                       const DecayFitOptions& opt) {
  if (n < 1) throw std::invalid_argument("decay exponent n must be >= 1");
  if (opt.ys.empty()) throw std::invalid_argument("no y samples");
  if (opt.refine < 1) throw std::invalid_argument("refine must be >= 1");
  DecayFitReport r;
  r.j = j;
  r.n = n;
  r.regime = regime;
  r.derivative = deriv;
  auto band = decay_band(j, regime, opt.family, opt.smoothness);
  double s = band.scale;
  r.scale = s;
  int N = shift_count(n);
  int L = regime == DecayRegime::high ? 2 * N : 0;
  double Y = 0.0;
  for (double y : opt.ys) Y = std::max(Y, std::abs(y));
  double reach = Y + 2.0 * std::max(L, 1) + 1.0;
  double a = -(reach + opt.window * s), b = -a;
  double dx = s / (opt.points_per_scale * opt.refine);
  double pf = opt.period_factor * opt.refine;
  auto d = deriv ? KernelDerivative::dx : KernelDerivative::none;
  auto K = columns(band.m, band.xi_lo, band.xi_hi, opt.ys, pot, a, b, dx, pf, d, opt.threads);
  bool scattered = regime != DecayRegime::local && !pot.is_free();
  KernelColumns K0;
  if (scattered)
    K0 = columns(band.m, band.xi_lo, band.xi_hi, opt.ys, BarrierPotential::free(), a, b, dx, pf, d, opt.threads);

  double ea = regime == DecayRegime::local ? 1.0 : std::exp2(0.5 * j);
  double P = regime == DecayRegime::local ? 1.0 : deriv ? std::exp2(j) : ea;
  int stride = std::max(1, K.n / 400);
  for (std::size_t c = 0; c < opt.ys.size(); ++c) {
    double y = opt.ys[c];
    const Vec& col = K.cols[c];
    auto preds = predicted_peaks(y, std::max(L, 2));
    double kmax = col.cwiseAbs().maxCoeff();
    int arg = 0;
    for (int i = 0; i < K.n; ++i) {
      double x = K.point(i), ak = std::abs(col(i));
      if (ak == kmax) arg = i;
      double env = regime == DecayRegime::local ? std::pow(1.0 + std::abs(x - y), -n) : envelope(x, y, ea, P, n, L);
      double ratio = ak / env;
      r.fitted_constant = std::max(r.fitted_constant, ratio);
      double far = regime == DecayRegime::local ? std::abs(x - y) : std::abs(x - nearest(preds, x));
      if (far >= 0.9 * opt.window * s) r.residual = std::max(r.residual, ratio);
      if (i % stride == 0) r.table.push_back({y, x, ak, env, ratio});
    }
    r.peak_offset = std::max(r.peak_offset, std::abs(K.point(arg) - y) / s);

    if (!scattered) continue;
    // local maxima of |K - K_free| within 0.75 of their neighbours, near the predicted peaks
    int rad = std::max(1, static_cast<int>(0.75 / K.dx));
    Eigen::VectorXd D = (col - K0.cols[c]).cwiseAbs();
    for (int i = 0; i < K.n; ++i) {
      double x = K.point(i);
      if (std::abs(x) > reach || D(i) < opt.peak_threshold * kmax) continue;
      bool top = true;
      for (int k = std::max(0, i - rad); k <= std::min(K.n - 1, i + rad) && top; ++k)
        top = D(k) < D(i) || (D(k) == D(i) && k >= i);
      if (!top) continue;
      double pr = nearest(preds, x);
      r.shift_peaks.push_back({y, x, D(i) / kmax, pr, std::abs(x - pr) / s});
    }
  }
  return r;
}

DecayRegime regime_for(int j, const BarrierPotential& pot) {
  return j > pot.j_threshold() ? DecayRegime::high : DecayRegime::low;
}

} // namespace

nlohmann::json DecayFitReport::to_json() const {
  nlohmann::json peaks = nlohmann::json::array();
  for (const auto& p : shift_peaks)
    peaks.push_back({{"y", p.y}, {"x", p.x}, {"amplitude", p.amplitude}, {"predicted", p.predicted},
                     {"offset_scales", p.offset}});
  return {{"j", j},
          {"n", n},
          {"regime", to_string(regime)},
          {"derivative", derivative},
          {"scale", scale},
          {"fitted_constant", fitted_constant},
          {"residual", residual},
          {"peak_offset_scales", peak_offset},
          {"shift_peaks", peaks},
          {"refined_constant", refined_constant},
          {"refinement_delta", refinement_delta}};
}

void DecayFitReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "y,x,abs_k,envelope,ratio\n";
  for (const auto& r : table) out << r.y << ',' << r.x << ',' << r.abs_k << ',' << r.envelope << ',' << r.ratio << '\n';
}

DecayFitReport fit_kernel_decay(int j, int n, const BarrierPotential& pot, const DecayFitOptions& opt) {
  return run_fit(j, n, regime_for(j, pot), false, pot, opt);
}

DecayFitReport fit_derivative_decay(int j, int n, const BarrierPotential& pot, const DecayFitOptions& opt) {
  return run_fit(j, n, regime_for(j, pot), true, pot, opt);
}

DecayFitReport fit_local_decay(int n, const BarrierPotential& pot, bool derivative, const DecayFitOptions& opt) {
  return run_fit(0, n, DecayRegime::local, derivative, pot, opt);
}

nlohmann::json KernelSizes::to_json() const {
  return {{"j", j},          {"lambda", lambda},     {"t", t},           {"size", size},
          {"weighted", weighted}, {"tail", tail},   {"d_size", d_size}, {"d_weighted", d_weighted},
          {"d_tail", d_tail}};
}

KernelSizes kernel_l2_sizes(int j, const BarrierPotential& pot, const Symbol& m, const KernelSizeOptions& opt) {
  if (opt.ys.empty()) throw std::invalid_argument("no y samples");
  auto sys = build_system(SystemKind::homogeneous, opt.family, opt.smoothness);
  Symbol mj = m * product_symbol(sys, j);
  double lo = std::sqrt(sys.band_lower(j)), hi = std::sqrt(sys.band_upper(j));
  KernelSizes r;
  r.j = j;
  r.lambda = std::exp2(-0.5 * j);
  r.t = opt.tail_factor * r.lambda;
  double Y = 0.0;
  for (double y : opt.ys) Y = std::max(Y, std::abs(y));
  // reflected peaks sit within |x| <= |y| + a few units
  double half = Y + 4.0 + opt.window * r.lambda;
  double dx = r.lambda / opt.points_per_scale;
  auto K = columns(mj, lo, hi, opt.ys, pot, -half, half, dx, 2.0, KernelDerivative::none, opt.threads);
  auto Kd = columns(mj, lo, hi, opt.ys, pot, -half, half, dx, 2.0, KernelDerivative::dy, opt.threads);
  double L = r.lambda, t = r.t;
  for (std::size_t c = 0; c < opt.ys.size(); ++c) {
    double y = opt.ys[c];
    double s2 = 0, w2 = 0, tl = 0, ds2 = 0, dw2 = 0, dtl = 0;
    for (int i = 0; i < K.n; ++i) {
      double x = K.point(i), z = std::min(std::abs(x - y), std::abs(x + y));
      double k = std::abs(K.cols[c](i)), kd = std::abs(Kd.cols[c](i));
      s2 += k * k;
      w2 += z * z * k * k;
      ds2 += kd * kd;
      dw2 += z * z * kd * kd;
      if (z > t) {
        tl += k;
        dtl += kd;
      }
    }
    double h = K.dx;
    r.size = std::max(r.size, std::sqrt(h * s2) * std::sqrt(L));
    r.weighted = std::max(r.weighted, std::sqrt(h * w2) / std::sqrt(L));
    r.tail = std::max(r.tail, h * tl * std::sqrt(t / L));
    r.d_size = std::max(r.d_size, std::sqrt(h * ds2) * std::pow(L, 1.5));
    r.d_weighted = std::max(r.d_weighted, std::sqrt(h * dw2) * std::sqrt(L));
    r.d_tail = std::max(r.d_tail, h * dtl * std::sqrt(t * L));
  }
  return r;
}

nlohmann::json HormanderResult::to_json() const {
  nlohmann::json tj = nlohmann::json::array();
  for (const auto& t : terms) tj.push_back({{"j", t.j}, {"value", t.value}});
  return {{"y", y},           {"ybar", ybar},         {"total", total},
          {"j_lo", j_lo},     {"j_hi", j_hi},         {"terms", tj},
          {"j_peak", j_peak}, {"peak_scale", peak_scale}, {"edge_fraction", edge_fraction},
          {"truncation_warning", truncation_warning}};
}

std::pair<int, int> hormander_default_range(double t, const BarrierPotential& pot, bool doubled) {
  double lo, hi;
  bool has_J = !pot.is_free();
  int J = pot.j_threshold();
  if (t > 0.0) {
    double js = 2.0 * std::log2(1.0 / t);
    lo = has_J ? std::min<double>(J - 8, js - 10) : js - 10;
    hi = has_J ? std::max<double>(J + 12, js + 14) : js + 14;
  } else {
    lo = has_J ? J - 8 : -8;
    hi = has_J ? J + 12 : 12;
  }
  int a = static_cast<int>(std::floor(lo)), b = static_cast<int>(std::ceil(hi));
  if (doubled) {
    int w = (b - a + 1) / 2;
    a -= w;
    b += w;
  }
  return {a, b};
}

HormanderResult hormander_integral(const Symbol& m, double y, double ybar, const BarrierPotential& pot,
                                   const HormanderOptions& opt) {
  double t = std::abs(y - ybar);
  HormanderResult r;
  r.y = y;
  r.ybar = ybar;
  auto [dlo, dhi] = hormander_default_range(t, pot, opt.doubled);
  r.j_lo = opt.j_lo == INT_MIN ? dlo : opt.j_lo;
  r.j_hi = opt.j_hi == INT_MIN ? dhi : opt.j_hi;
  if (r.j_hi < r.j_lo) throw std::invalid_argument("empty j range");
  auto sys = build_system(SystemKind::homogeneous, opt.family, opt.smoothness, std::min(-40, r.j_lo - 2),
                          std::max(40, r.j_hi + 2));
  int count = r.j_hi - r.j_lo + 1;
  r.terms.resize(count);
  double eps2 = pot.is_free() ? 0.0 : pot.epsilon() * pot.epsilon();
  parallel_for(count, opt.threads, [&](int k) {
    int j = r.j_lo + k;
    r.terms[k] = {j, 0.0};
    if (t == 0.0) return;
    double lam = std::exp2(-0.5 * j);
    double lo = std::sqrt(sys.band_lower(j)), hi = std::sqrt(sys.band_upper(j));
    Symbol mj = m * product_symbol(sys, j);
    double R = opt.window * lam, a, b;
    if (eps2 / (lo * lo) >= opt.reflection_cut) {
      double X = std::max(std::abs(y), std::abs(ybar)) + 4.0 + R;
      a = -X;
      b = X;
    } else {
      a = std::min(y, ybar) - R;
      b = std::max(y, ybar) + R;
    }
    auto K = synthesize_kernel_columns(mj, lo, hi, {y, ybar}, pot, a, b, lam / opt.points_per_scale);
    double s = 0.0;
    for (int i = 0; i < K.n; ++i) {
      double x = K.point(i);
      if (std::min(std::abs(x - ybar), std::abs(x + ybar)) <= 2.0 * t) continue;
      s += std::abs(K.cols[0](i) - K.cols[1](i));
    }
    r.terms[k].value = s * K.dx;
  });
  double best = -1.0;
  for (const auto& term : r.terms) {
    r.total += term.value;
    if (term.value > best) {
      best = term.value;
      r.j_peak = term.j;
    }
  }
  r.peak_scale = std::exp2(0.5 * r.j_peak) * t;
  if (r.total > 0.0) r.edge_fraction = std::max(r.terms.front().value, r.terms.back().value) / r.total;
  r.truncation_warning = r.edge_fraction > 0.01;
  return r;
}

double mikhlin_constant(const Symbol& m, double lambda_lo, double lambda_hi, int samples) {
  if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo) || samples < 2) throw std::invalid_argument("bad lambda range");
  double c = 0.0, step = std::log(lambda_hi / lambda_lo) / (samples - 1);
  for (int k = 0; k < samples; ++k) {
    double lam = lambda_lo * std::exp(k * step), h = 1e-4 * lam;
    c = std::max(c, lam * std::abs(m(lam + h) - m(lam - h)) / (2.0 * h));
  }
  return c;
}

MultiplierSpec make_multiplier(const Symbol& m, const std::string& label) {
  MultiplierSpec s{m, label.empty() ? m.descriptor : label};
  s.mikhlin_constant = mikhlin_constant(m);
  for (int k = 0; k <= 2400; ++k) s.sup_abs = std::max(s.sup_abs, std::abs(m(1e-6 * std::pow(10.0, k / 200.0))));
  s.sup_abs = std::max(s.sup_abs, std::abs(m(0.0)));
  return s;
}

nlohmann::json MultiplierNorm::to_json() const {
  return {{"p", p}, {"lp_ratio", lp_ratio}, {"besov_ratio", besov_ratio}, {"worst_lp", worst_lp},
          {"worst_besov", worst_besov}};
}

MultiplierNorm multiplier_operator_norm(const MultiplierSpec& spec, double p, const std::vector<Vec>& family,
                                        const SpectralBasis& basis, const BesovParams* besov,
                                        const DyadicSystem* sys) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("multiplier norm needs 1 < p < inf");
  if (family.size() < 20) throw std::invalid_argument("multiplier test family needs at least 20 functions");
  if (besov && !sys) throw std::invalid_argument("Besov ratio needs a dyadic system");
  Vec mv = basis.symbol_values(spec.m);
  const auto& grid = basis.spatial();
  int count = static_cast<int>(family.size());
  std::vector<double> lp(count), bs(count, 0.0);
  parallel_for(count, basis.threads(), [&](int i) {
    Vec F = basis.forward(family[i]);
    Vec G = mv.cwiseProduct(F);
    lp[i] = lp_norm(basis.adjoint(G), grid, p) / lp_norm(family[i], grid, p);
    if (besov) {
      BesovParams bp = *besov;
      bs[i] = besov_norm(BandDecomposition(*sys, basis, G), bp).total /
              besov_norm(BandDecomposition(*sys, basis, F), bp).total;
    }
  });
  MultiplierNorm r;
  r.p = p;
  for (int i = 0; i < count; ++i) {
    if (lp[i] > r.lp_ratio) {
      r.lp_ratio = lp[i];
      r.worst_lp = i;
    }
    if (besov && bs[i] > r.besov_ratio) {
      r.besov_ratio = bs[i];
      r.worst_besov = i;
    }
  }
  return r;
}

std::vector<BesovRatio> multiplier_besov_ratios(const MultiplierSpec& spec, const std::vector<Vec>& family,
                                                const SpectralBasis& basis, const DyadicSystem& sys,
                                                const std::vector<BesovParams>& params) {
  if (params.empty()) return {};
  std::vector<double> ps;
  for (const auto& prm : params) {
    prm.validate();
    if (prm.homogeneous != params[0].homogeneous || prm.j_min != params[0].j_min || prm.j_max != params[0].j_max)
      throw std::invalid_argument("parameter sets may differ only in alpha, p and q");
    if (std::find(ps.begin(), ps.end(), prm.p) == ps.end()) ps.push_back(prm.p);
  }
  Vec mv = basis.symbol_values(spec.m);
  int count = static_cast<int>(family.size());
  // bands[i][k]: (image, original) band norms of member i at exponent ps[k]
  std::vector<std::vector<std::pair<std::vector<BandNorm>, std::vector<BandNorm>>>> bands(count);
  parallel_for(count, basis.threads(), [&](int i) {
    Vec F = basis.forward(family[i]);
    BandDecomposition df(sys, basis, F), dg(sys, basis, mv.cwiseProduct(F));
    for (double p : ps) {
      const BesovParams* first = nullptr;
      for (const auto& prm : params)
        if (prm.p == p) {
          first = &prm;
          break;
        }
      bands[i].emplace_back(besov_norm(dg, *first).bands, besov_norm(df, *first).bands);
    }
  });
  std::vector<BesovRatio> out;
  for (const auto& prm : params) {
    int k = static_cast<int>(std::find(ps.begin(), ps.end(), prm.p) - ps.begin());
    BesovRatio r{prm};
    for (int i = 0; i < count; ++i) {
      double v = besov_from_bands(bands[i][k].first, prm, sys.kind()).total /
                 besov_from_bands(bands[i][k].second, prm, sys.kind()).total;
      if (v > r.ratio) {
        r.ratio = v;
        r.worst = i;
      }
    }
    out.push_back(r);
  }
  return out;
}

} // namespace barrier
