#include "barrier/besov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace barrier {

void BesovParams::validate() const {
  if (!(p > 0.0)) throw std::invalid_argument("Besov p must be positive");
  if (!(q > 0.0)) throw std::invalid_argument("Besov q must be positive");
  if (!std::isfinite(alpha)) throw std::invalid_argument("Besov alpha must be finite");
  if (homogeneous && j_max >= 0 && j_min > j_max) throw std::invalid_argument("empty band range");
}

nlohmann::json BesovParams::to_json() const {
  nlohmann::json j = {{"alpha", alpha}, {"p", p}, {"homogeneous", homogeneous}, {"j_min", j_min},
                      {"j_max", j_max}, {"s", s}};
  j["q"] = std::isinf(q) ? nlohmann::json("inf") : nlohmann::json(q);
  return j;
}

double lp_norm(const Vec& f, const SpatialGrid& grid, double p) {
  if (std::isinf(p)) return f.cwiseAbs().maxCoeff();
  auto w = grid.weights();
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += w[i] * std::pow(std::abs(f(i)), p);
  return std::pow(s, 1.0 / p);
}

BandDecomposition::BandDecomposition(const DyadicSystem& sys, const SpectralBasis& basis, Vec transform)
    : sys_(sys), basis_(basis), Ff_(std::move(transform)) {}

BandDecomposition BandDecomposition::of(const Vec& f, const DyadicSystem& sys, const SpectralBasis& basis) {
  return BandDecomposition(sys, basis, basis.forward(f));
}

Vec BandDecomposition::band_spectral(int j) const { return basis_.symbol_values(band_symbol(sys_, j)).cwiseProduct(Ff_); }

Vec BandDecomposition::band(int j) const { return basis_.adjoint(band_spectral(j)); }

int BandDecomposition::top_band() const {
  double top = basis_.spectral().xi_max();
  top *= top;
  int j = sys_.first_band();
  while (j < sys_.j_max() && sys_.band_lower(j + 1) < top) ++j;
  return j;
}

nlohmann::json BesovResult::to_json() const {
  nlohmann::json b = nlohmann::json::array();
  for (const auto& x : bands) b.push_back({{"j", x.j}, {"norm", x.norm}});
  return {{"total", total}, {"bands", b}, {"truncation_warning", truncation_warning},
          {"top_fraction", top_fraction}, {"params", params.to_json()}};
}

BesovResult besov_from_bands(const std::vector<BandNorm>& bands, const BesovParams& prm, SystemKind kind) {
  BesovResult r;
  r.params = prm;
  r.bands = bands;
  double head = 0.0, acc = 0.0, last = 0.0;
  for (const auto& b : bands) {
    if (kind == SystemKind::inhomogeneous && b.j == 0) {
      head = b.norm;
      last = head;
      continue;
    }
    double w = std::exp2(b.j * prm.alpha) * b.norm;
    last = w;
    if (std::isinf(prm.q)) acc = std::max(acc, w);
    else acc += std::pow(w, prm.q);
  }
  double tail = std::isinf(prm.q) ? acc : std::pow(acc, 1.0 / prm.q);
  r.total = head + tail;
  r.top_fraction = r.total > 0.0 ? last / r.total : 0.0;
  r.truncation_warning = r.top_fraction > 1e-8;
  return r;
}

namespace {

std::pair<int, int> band_range(const BandDecomposition& dec, const BesovParams& prm) {
  const auto& sys = dec.system();
  int lo = prm.homogeneous ? std::max(prm.j_min, sys.j_min()) : 0;
  int hi = dec.top_band();
  if (prm.j_max >= 0) hi = std::min(hi, prm.j_max);
  return {lo, hi};
}

void check_kind(const BandDecomposition& dec, const BesovParams& prm) {
  prm.validate();
  bool hom = dec.system().kind() == SystemKind::homogeneous;
  if (hom != prm.homogeneous) throw std::invalid_argument("Besov params and dyadic system disagree on homogeneity");
}

} // namespace

BesovResult besov_norm(const BandDecomposition& dec, const BesovParams& prm) {
  check_kind(dec, prm);
  auto [lo, hi] = band_range(dec, prm);
  std::vector<BandNorm> bands;
  const auto& grid = dec.basis().spatial();
  for (int j = lo; j <= hi; ++j) {
    // p = 2 by Plancherel: no spatial synthesis, so nothing is lost at the grid ends
    double nj = prm.p == 2.0 ? dec.basis().spectral_l2(dec.band_spectral(j)) : lp_norm(dec.band(j), grid, prm.p);
    bands.push_back({j, nj});
  }
  return besov_from_bands(bands, prm, dec.system().kind());
}

BesovResult besov_norm(const Vec& f, const BesovParams& prm, const DyadicSystem& sys, const SpectralBasis& basis) {
  return besov_norm(BandDecomposition::of(f, sys, basis), prm);
}

int peetre_shift_count(double s) {
  int n = static_cast<int>(std::ceil((std::floor(s) + 2.0) / 4.0));
  return std::max(1, n);
}

PeetreResult peetre_maximal(const BandDecomposition& dec, int j, double s, int refine) {
  if (!(s > 0.0)) throw std::invalid_argument("Peetre exponent must be positive");
  if (refine < 1) throw std::invalid_argument("refine must be >= 1");
  const auto& basis = dec.basis();
  const auto& grid = basis.spatial();
  SpatialGrid fine = grid.refined(refine);
  auto t = fine.points();
  Vec g = basis.adjoint_at(dec.band_spectral(j), t);

  PeetreResult r;
  r.j = j;
  r.s = s;
  r.band.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) r.band(i) = g(i * refine);

  int J = basis.potential().j_threshold();
  bool head = dec.system().kind() == SystemKind::inhomogeneous && j == 0;
  double a = head ? 1.0 : std::exp2(0.5 * j);
  bool shifted = !head && j > J;
  std::vector<double> offs{0.0};
  if (shifted) {
    int N = peetre_shift_count(s);
    for (int l = 1; l <= 2 * N; ++l) {
      offs.push_back(2.0 * l);
      offs.push_back(-2.0 * l);
    }
  }
  // visit t by decreasing |g|: once |g(t)| <= current best no later t can win
  std::vector<double> mag(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) mag[k] = std::abs(g(k));
  std::vector<int> order(t.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int u, int v) { return mag[u] > mag[v] || (mag[u] == mag[v] && u < v); });

  auto x = grid.points();
  r.maximal.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    double best = 0.0;
    for (int k : order) {
      if (mag[k] <= best) break;
      double d;
      if (head) d = std::abs(x[i] - t[k]);
      else {
        d = kInf;
        for (double o : offs) d = std::min({d, std::abs(x[i] - t[k] + o), std::abs(x[i] + t[k] + o)});
      }
      double v = mag[k] / std::pow(1.0 + a * d, s);
      best = std::max(best, v);
    }
    r.maximal(i) = best;
  }
  return r;
}

BesovResult peetre_besov_norm(const BandDecomposition& dec, const BesovParams& prm, int refine) {
  check_kind(dec, prm);
  if (!(prm.s > 1.0 / prm.p)) throw std::invalid_argument("Peetre exponent must exceed 1/p");
  auto [lo, hi] = band_range(dec, prm);
  std::vector<BandNorm> bands;
  const auto& grid = dec.basis().spatial();
  for (int j = lo; j <= hi; ++j) {
    auto pm = peetre_maximal(dec, j, prm.s, refine);
    bands.push_back({j, lp_norm(pm.maximal.cast<cplx>(), grid, prm.p)});
  }
  return besov_from_bands(bands, prm, dec.system().kind());
}

RatioRange norm_equivalence_ratio(const std::vector<Vec>& family, const BesovParams& prm, const DyadicSystem& a,
                                  const DyadicSystem& b, const SpectralBasis& basis) {
  RatioRange r;
  for (const auto& f : family) {
    Vec F = basis.forward(f);
    double na = besov_norm(BandDecomposition(a, basis, F), prm).total;
    double nb = besov_norm(BandDecomposition(b, basis, F), prm).total;
    double q = na / nb;
    r.min = std::min(r.min, q);
    r.max = std::max(r.max, q);
  }
  return r;
}

} // namespace barrier
