#pragma once

#include <limits>
#include <vector>

#include <json.hpp>

#include "barrier/dyadic.hpp"
#include "barrier/families.hpp"
#include "barrier/transform.hpp"

namespace barrier {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BesovParams {
  double alpha = 0.5;
  double p = 2.0;
  double q = 2.0;          // kInf for the supremum
  bool homogeneous = false;
  int j_min = -10;         // homogeneous only
  int j_max = -1;          // -1: last band that meets the spectral grid
  double s = 1.0;          // Peetre exponent, must exceed 1/p

  void validate() const;
  nlohmann::json to_json() const;
};

// trapezoid L^p (quasi-)norm, p = kInf gives the max
double lp_norm(const Vec& f, const SpatialGrid& grid, double p);

// Ff computed once; band functions phi_j(H) f on demand
class BandDecomposition {
public:
  BandDecomposition(const DyadicSystem& sys, const SpectralBasis& basis, Vec transform);
  static BandDecomposition of(const Vec& f, const DyadicSystem& sys, const SpectralBasis& basis);

  const Vec& transform() const { return Ff_; }
  Vec band(int j) const;         // phi_j(H) f on the grid
  Vec band_spectral(int j) const; // phi_j(xi^2) Ff
  int top_band() const;          // last band whose support meets the grid
  const SpectralBasis& basis() const { return basis_; }
  const DyadicSystem& system() const { return sys_; }

private:
  DyadicSystem sys_;
  const SpectralBasis& basis_;
  Vec Ff_;
};

struct BandNorm {
  int j;
  double norm;
};

struct BesovResult {
  double total = 0.0;
  std::vector<BandNorm> bands; // unweighted ||phi_j(H) f||_p
  bool truncation_warning = false;
  double top_fraction = 0.0;   // weighted top band / total
  BesovParams params;
  nlohmann::json to_json() const;
};

// ||Phi(H) f||_p + (sum_j (2^{j alpha} ||phi_j(H) f||_p)^q)^{1/q}
BesovResult besov_norm(const Vec& f, const BesovParams& prm, const DyadicSystem& sys, const SpectralBasis& basis);
BesovResult besov_norm(const BandDecomposition& dec, const BesovParams& prm);
// combine precomputed band norms (same weighting as besov_norm)
BesovResult besov_from_bands(const std::vector<BandNorm>& bands, const BesovParams& prm, SystemKind kind);

// Peetre shift set for j above the threshold: l = 0..2N, N = max(1, ceil(([s] + 2) / 4))
int peetre_shift_count(double s);

struct PeetreResult {
  int j = 0;
  double s = 0.0;
  Eigen::VectorXd maximal; // phi_j^* f on the grid
  Vec band;                // phi_j(H) f on the grid, same samples the sup ran over
};

// sup over t on a `refine`-times finer grid of |phi_j(H) f(t)| / weight(x, t)
PeetreResult peetre_maximal(const BandDecomposition& dec, int j, double s, int refine = 4);

// ||phi_j^* f||_p + ... with the same weighting as besov_norm
BesovResult peetre_besov_norm(const BandDecomposition& dec, const BesovParams& prm, int refine = 4);

struct RatioRange {
  double min = kInf, max = 0.0;
  double spread() const { return max / min; }
};

// ratio ||f||_{B, system a} / ||f||_{B, system b} over the family
RatioRange norm_equivalence_ratio(const std::vector<Vec>& family, const BesovParams& prm, const DyadicSystem& a,
                                  const DyadicSystem& b, const SpectralBasis& basis);

} // namespace barrier
