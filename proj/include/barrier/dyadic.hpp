#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace barrier {

enum class SystemKind { inhomogeneous, homogeneous };

// Dyadic pair (Phi, phi), (Psi, psi) on the spectral variable lambda = xi^2.
// Band j >= 1 is phi(2^{-j} lambda); band 0 of an inhomogeneous system is Phi.
// Homogeneous systems use phi(2^{-j} .) for every j in [j_min, j_max].
class DyadicSystem {
public:
  SystemKind kind() const { return kind_; }
  const std::string& family_id() const { return family_; }
  int smoothness_order() const { return order_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  double split() const { return split_; }

  double head(double lambda) const;      // Phi
  double head_dual(double lambda) const; // Psi
  double band(double eta) const;         // phi
  double band_dual(double eta) const;    // psi

  double eval(int j, double lambda) const;         // phi_j or Phi
  double eval_dual(int j, double lambda) const;    // psi_j or Psi
  double eval_product(int j, double lambda) const; // (phi psi)_j or Phi Psi

  // lowest band index that is used: 0 (inhomogeneous) or j_min
  int first_band() const { return kind_ == SystemKind::inhomogeneous ? 0 : j_min_; }

  // largest |lambda| on which band j can be nonzero
  double band_upper(int j) const;
  double band_lower(int j) const;

  // realized lower bounds: phi, psi on 3/8 <= |eta| <= 7/8, Phi, Psi on |lambda| <= 1/2
  double band_lower_bound() const { return c_band_; }
  double head_lower_bound() const { return c_head_; }

  // copy with phi and psi multiplied by a constant (used to check diagnostics)
  DyadicSystem with_band_scale(double factor) const;

  nlohmann::json descriptor() const;
  static DyadicSystem from_descriptor(const nlohmann::json& d);

  friend DyadicSystem build_system(SystemKind, const std::string&, int, int, int);

private:
  double bump(double eta) const;         // u(eta)
  double dyadic_sum(double eta) const;   // sum over all k of u(2^{-k} eta)
  double head_ratio(double lambda) const; // sum_{k<=0} u(2^{-k} lambda) / S(lambda)

  SystemKind kind_ = SystemKind::inhomogeneous;
  std::string family_;
  int order_ = 2;
  int j_min_ = 0, j_max_ = 40;
  bool log_profile_ = false;
  double split_ = 0.5; // phi = r^split, psi = r^{1-split}
  double scale_ = 1.0;
  double c_band_ = 0.0, c_head_ = 0.0;
};

// Known families: "exp-bump" (bump linear in |eta|, phi = psi) and
// "log-bump-asym" (bump in log2 |eta|, phi != psi).
DyadicSystem build_system(SystemKind kind, const std::string& family_id, int smoothness_order = 2,
                          int j_min = -40, int j_max = 40);

std::vector<std::string> known_families();

struct SystemReport {
  double support_head = 0.0;   // largest |lambda| with Phi != 0
  double support_band_lo = 0.0, support_band_hi = 0.0;
  double band_lower_bound = 0.0, head_lower_bound = 0.0;
  double partition_error = 0.0; // max |sum of products - 1| over probes
  int probes = 0;
  bool support_ok = false, lower_bound_ok = false, partition_ok = false;
  bool passed() const { return support_ok && lower_bound_ok && partition_ok; }
  nlohmann::json to_json() const;
};

SystemReport check_system(const DyadicSystem& sys, int probe_count = 2000, unsigned seed = 7);

// sum over bands of (phi psi)_j(lambda), including the head for inhomogeneous systems
double partition_sum(const DyadicSystem& sys, double lambda);

} // namespace barrier
