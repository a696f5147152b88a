#include "barrier/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace barrier {

namespace {

struct FamilyInfo {
  const char* id;
  bool log_profile;
  double split;
};

const FamilyInfo kFamilies[] = {
    {"exp-bump", false, 0.5},
    {"log-bump-asym", true, 0.35},
};

} // namespace

std::vector<std::string> known_families() {
  std::vector<std::string> out;
  for (const auto& f : kFamilies) out.emplace_back(f.id);
  return out;
}

double DyadicSystem::bump(double eta) const {
  double a = std::abs(eta);
  if (a <= 0.25 || a >= 1.0) return 0.0;
  double t = log_profile_ ? std::log2(a) + 1.0 : (a - 0.625) / 0.375;
  double d = 1.0 - t * t;
  if (d <= 0.0) return 0.0;
  return std::exp(-0.5 * order_ / d);
}

double DyadicSystem::dyadic_sum(double eta) const {
  double a = std::abs(eta);
  if (a == 0.0) return 0.0;
  int e;
  std::frexp(a, &e); // a in [2^{e-1}, 2^e)
  double s = 0.0;
  for (int k = e - 1; k <= e + 2; ++k) s += bump(std::ldexp(a, -k));
  return s;
}

double DyadicSystem::head_ratio(double lambda) const {
  double a = std::abs(lambda);
  if (a == 0.0) return 1.0;
  if (a >= 1.0) return 0.0;
  int e;
  std::frexp(a, &e);
  double s = 0.0, num = 0.0;
  for (int k = e - 1; k <= e + 2; ++k) {
    double u = bump(std::ldexp(a, -k));
    s += u;
    if (k <= 0) num += u;
  }
  return num / s;
}

double DyadicSystem::band(double eta) const {
  double u = bump(eta);
  if (u == 0.0) return 0.0;
  double r = u / dyadic_sum(eta);
  return scale_ * (split_ == 0.5 ? std::sqrt(r) : std::pow(r, split_));
}

double DyadicSystem::band_dual(double eta) const {
  double u = bump(eta);
  if (u == 0.0) return 0.0;
  double r = u / dyadic_sum(eta);
  return scale_ * (split_ == 0.5 ? std::sqrt(r) : std::pow(r, 1.0 - split_));
}

double DyadicSystem::head(double lambda) const {
  double r = head_ratio(lambda);
  if (r == 0.0 || r == 1.0) return r;
  return split_ == 0.5 ? std::sqrt(r) : std::pow(r, split_);
}

double DyadicSystem::head_dual(double lambda) const {
  double r = head_ratio(lambda);
  if (r == 0.0 || r == 1.0) return r;
  return split_ == 0.5 ? std::sqrt(r) : std::pow(r, 1.0 - split_);
}

double DyadicSystem::eval(int j, double lambda) const {
  if (kind_ == SystemKind::inhomogeneous) {
    if (j < 0) return 0.0;
    if (j == 0) return head(lambda);
    return band(std::ldexp(lambda, -j));
  }
  if (j < j_min_ || j > j_max_) return 0.0;
  return band(std::ldexp(lambda, -j));
}

double DyadicSystem::eval_dual(int j, double lambda) const {
  if (kind_ == SystemKind::inhomogeneous) {
    if (j < 0) return 0.0;
    if (j == 0) return head_dual(lambda);
    return band_dual(std::ldexp(lambda, -j));
  }
  if (j < j_min_ || j > j_max_) return 0.0;
  return band_dual(std::ldexp(lambda, -j));
}

double DyadicSystem::eval_product(int j, double lambda) const {
  if (kind_ == SystemKind::inhomogeneous && j == 0) {
    double r = head_ratio(lambda);
    return r;
  }
  double eta = std::ldexp(lambda, -j);
  if ((kind_ == SystemKind::inhomogeneous && j < 0) ||
      (kind_ == SystemKind::homogeneous && (j < j_min_ || j > j_max_)))
    return 0.0;
  double u = bump(eta);
  if (u == 0.0) return 0.0;
  return scale_ * scale_ * (u / dyadic_sum(eta));
}

double DyadicSystem::band_upper(int j) const {
  if (kind_ == SystemKind::inhomogeneous && j == 0) return 1.0;
  return std::ldexp(1.0, j);
}

double DyadicSystem::band_lower(int j) const {
  if (kind_ == SystemKind::inhomogeneous && j == 0) return 0.0;
  return std::ldexp(1.0, j - 2);
}

DyadicSystem DyadicSystem::with_band_scale(double factor) const {
  DyadicSystem c = *this;
  c.scale_ *= factor;
  c.c_band_ *= factor;
  return c;
}

nlohmann::json DyadicSystem::descriptor() const {
  return {{"family_id", family_},
          {"kind", kind_ == SystemKind::inhomogeneous ? "inhomogeneous" : "homogeneous"},
          {"smoothness_order", order_},
          {"j_min", j_min_},
          {"j_max", j_max_},
          {"split", split_},
          {"band_scale", scale_}};
}

DyadicSystem DyadicSystem::from_descriptor(const nlohmann::json& d) {
  SystemKind kind = d.value("kind", "inhomogeneous") == "homogeneous" ? SystemKind::homogeneous
                                                                       : SystemKind::inhomogeneous;
  DyadicSystem s = build_system(kind, d.at("family_id").get<std::string>(), d.value("smoothness_order", 2),
                                d.value("j_min", -40), d.value("j_max", 40));
  double scale = d.value("band_scale", 1.0);
  return scale == 1.0 ? s : s.with_band_scale(scale);
}

DyadicSystem build_system(SystemKind kind, const std::string& family_id, int smoothness_order, int j_min,
                          int j_max) {
  const FamilyInfo* info = nullptr;
  for (const auto& f : kFamilies)
    if (family_id == f.id) info = &f;
  if (!info) throw std::invalid_argument("unknown dyadic family: " + family_id);
  if (smoothness_order < 1) throw std::invalid_argument("smoothness_order must be >= 1");
  if (j_min > j_max) throw std::invalid_argument("empty band range");
  DyadicSystem s;
  s.kind_ = kind;
  s.family_ = family_id;
  s.order_ = smoothness_order;
  s.log_profile_ = info->log_profile;
  s.split_ = info->split;
  s.j_min_ = kind == SystemKind::inhomogeneous ? 0 : j_min;
  s.j_max_ = j_max;
  double cb = 1.0;
  for (int i = 0; i <= 2000; ++i) {
    double eta = 0.375 + 0.5 * i / 2000.0;
    cb = std::min({cb, s.band(eta), s.band_dual(eta)});
  }
  s.c_band_ = cb;
  double ch = 1.0;
  for (int i = 0; i <= 2000; ++i) {
    double lam = 0.5 * i / 2000.0;
    ch = std::min({ch, s.head(lam), s.head_dual(lam)});
  }
  s.c_head_ = ch;
  if (cb < 1e-8 || ch < 1e-8) throw std::logic_error("dyadic family violates its lower bound");
  return s;
}

double partition_sum(const DyadicSystem& sys, double lambda) {
  double a = std::abs(lambda);
  double s = 0.0;
  if (sys.kind() == SystemKind::inhomogeneous) {
    s = sys.eval_product(0, lambda);
    if (a <= 0.5) return s;
    int e;
    std::frexp(a, &e);
    int top = std::min(sys.j_max(), e + 2);
    for (int j = 1; j <= top; ++j) s += sys.eval_product(j, lambda);
    return s;
  }
  for (int j = sys.j_min(); j <= sys.j_max(); ++j) s += sys.eval_product(j, lambda);
  return s;
}

nlohmann::json SystemReport::to_json() const {
  return {{"support_head", support_head},
          {"support_band", {support_band_lo, support_band_hi}},
          {"band_lower_bound", band_lower_bound},
          {"head_lower_bound", head_lower_bound},
          {"partition_error", partition_error},
          {"probes", probes},
          {"support_ok", support_ok},
          {"lower_bound_ok", lower_bound_ok},
          {"partition_ok", partition_ok}};
}

SystemReport check_system(const DyadicSystem& sys, int probe_count, unsigned seed) {
  SystemReport r;
  const int n = 20000;
  r.support_band_lo = 2.0;
  for (int i = 0; i <= n; ++i) {
    double eta = 2.0 * i / n;
    if (sys.head(eta) != 0.0 || sys.head_dual(eta) != 0.0) r.support_head = std::max(r.support_head, eta);
    if (sys.band(eta) != 0.0 || sys.band_dual(eta) != 0.0) {
      r.support_band_lo = std::min(r.support_band_lo, eta);
      r.support_band_hi = std::max(r.support_band_hi, eta);
    }
  }
  r.support_ok = r.support_head <= 1.0 && r.support_band_lo >= 0.25 && r.support_band_hi <= 1.0;
  r.band_lower_bound = 1.0;
  r.head_lower_bound = 1.0;
  for (int i = 0; i <= n; ++i) {
    double eta = 0.375 + 0.5 * i / n;
    r.band_lower_bound = std::min({r.band_lower_bound, sys.band(eta), sys.band_dual(eta)});
    double lam = 0.5 * i / n;
    r.head_lower_bound = std::min({r.head_lower_bound, sys.head(lam), sys.head_dual(lam)});
  }
  r.lower_bound_ok = r.band_lower_bound > 1e-6 && r.head_lower_bound > 1e-6;

  std::mt19937_64 rng(seed);
  double lo, hi;
  if (sys.kind() == SystemKind::inhomogeneous) {
    lo = -10.0;
    hi = std::min(sys.j_max() - 1.0, 30.0);
  } else {
    lo = sys.j_min() + 2.0;
    hi = sys.j_max() - 2.0;
  }
  std::uniform_real_distribution<double> ex(lo, hi), sg(0.0, 1.0);
  std::vector<double> probes;
  for (int i = 0; i < probe_count; ++i) probes.push_back((sg(rng) < 0.5 ? -1.0 : 1.0) * std::exp2(ex(rng)));
  // dyadic breakpoints, including the origin for inhomogeneous systems
  for (int j = static_cast<int>(lo); j <= static_cast<int>(hi); ++j)
    for (double f : {0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0}) probes.push_back(std::ldexp(f, j));
  if (sys.kind() == SystemKind::inhomogeneous) probes.push_back(0.0);
  for (double lam : probes) r.partition_error = std::max(r.partition_error, std::abs(partition_sum(sys, lam) - 1.0));
  r.probes = static_cast<int>(probes.size());
  r.partition_ok = r.partition_error <= 1e-12;
  return r;
}

} // namespace barrier
