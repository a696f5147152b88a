#pragma once

#include <climits>
#include <string>
#include <vector>

#include <json.hpp>

#include "barrier/besov.hpp"
#include "barrier/transform.hpp"

namespace barrier {

// Kernel decay fits. K_j = phi(2^{-j} H) for the high (j > J) and low
// (j <= J) regimes, K = Phi(H) for the local regime.
enum class DecayRegime { high, low, local };
const char* to_string(DecayRegime r);

struct DecayFitOptions {
  std::vector<double> ys{-2.6, -0.55, 0.35, 1.45, 3.1};
  double window = 600.0;         // half-width past the outermost predicted peak, in kernel scales
  double points_per_scale = 8.0;
  double period_factor = 3.0;    // FFT period / window length
  int refine = 1;                // multiplies points_per_scale and period_factor
  double peak_threshold = 1e-8;  // relative to max |K| of the column
  std::string family = "exp-bump";
  int smoothness = 2;
  int threads = 1;
};

struct EnvelopeRow {
  double y, x, abs_k, envelope, ratio;
};

struct ShiftPeak {
  double y, x;
  double amplitude;  // |K - K_free| at the peak over max |K| of the column
  double predicted;  // nearest of +-y +- 2l
  double offset;     // |x - predicted| in kernel scales
};

struct DecayFitReport {
  int j = 0, n = 0;
  DecayRegime regime = DecayRegime::high;
  bool derivative = false;
  double scale = 1.0;            // 2^{-j/2}, or 1 for the local regime
  double fitted_constant = 0.0;  // max |K| / envelope over all (x, y)
  double residual = 0.0;         // same ratio over the outer 10% of the window; below C when the max is interior
  double peak_offset = 0.0;      // max over y of |argmax_x |K(x, y)| - y| in kernel scales
  std::vector<ShiftPeak> shift_peaks;
  std::vector<EnvelopeRow> table; // subsampled
  double refined_constant = 0.0;  // set by fit_with_refinement
  double refinement_delta = 0.0;  // |C_refined / C - 1|

  nlohmann::json to_json() const;
  void write_csv(const std::string& path) const;
};

DecayFitReport fit_kernel_decay(int j, int n, const BarrierPotential& pot, const DecayFitOptions& opt = {});
DecayFitReport fit_derivative_decay(int j, int n, const BarrierPotential& pot, const DecayFitOptions& opt = {});
DecayFitReport fit_local_decay(int n, const BarrierPotential& pot, bool derivative = false,
                               const DecayFitOptions& opt = {});

// runs `fit` at refine and 2 * refine and fills refined_constant / refinement_delta
template <class Fit>
DecayFitReport fit_with_refinement(Fit&& fit, DecayFitOptions opt) {
  DecayFitReport r = fit(opt);
  opt.refine *= 2;
  DecayFitReport f = fit(opt);
  r.refined_constant = f.fitted_constant;
  r.refinement_delta = std::abs(f.fitted_constant / r.fitted_constant - 1.0);
  return r;
}

// Kernel sizes for m_j = m (phi psi)_j with lambda = 2^{-j/2}, z = min |x +- y|,
// tail radius t = tail_factor * lambda. All six are normalized so that they
// should stay bounded in j:
//   size      ||K_j(., y)||_2 lambda^{1/2}
//   weighted  ||z K_j(., y)||_2 lambda^{-1/2}
//   tail      int_{z > t} |K_j| t^{1/2} lambda^{-1/2}
// and the same with d/dy K_j scaled by lambda^{3/2}, lambda^{1/2}, t^{1/2} lambda^{1/2}.
struct KernelSizeOptions {
  std::vector<double> ys{-2.6, -0.55, 0.35, 1.45, 3.1};
  double window = 800.0;
  double points_per_scale = 8.0;
  double tail_factor = 1.0;
  std::string family = "exp-bump";
  int smoothness = 2;
  int threads = 1;
};

struct KernelSizes {
  int j = 0;
  double lambda = 0.0, t = 0.0;
  double size = 0.0, weighted = 0.0, tail = 0.0;
  double d_size = 0.0, d_weighted = 0.0, d_tail = 0.0;
  std::vector<double> values() const { return {size, weighted, tail, d_size, d_weighted, d_tail}; }
  nlohmann::json to_json() const;
};

KernelSizes kernel_l2_sizes(int j, const BarrierPotential& pot, const Symbol& m = identity_symbol(),
                            const KernelSizeOptions& opt = {});

// sum over j of int_{z > 2t} |K_j(x, y) - K_j(x, ybar)| dx, z = min |x +- ybar|,
// t = |y - ybar|, K_j the kernel of m (phi psi)_j(H)
struct HormanderOptions {
  int j_lo = INT_MIN, j_hi = INT_MIN; // INT_MIN: automatic range
  bool doubled = false;               // extend the range by half its width at each end
  double window = 5000.0;             // kernel scales around {y, ybar}
  double points_per_scale = 4.0;
  double reflection_cut = 1e-6;       // full window while eps^2 / xi_min^2 >= this
  std::string family = "exp-bump";
  int smoothness = 2;
  int threads = 1;
};

struct HormanderTerm {
  int j;
  double value;
};

struct HormanderResult {
  double y = 0.0, ybar = 0.0, total = 0.0;
  int j_lo = 0, j_hi = 0;
  std::vector<HormanderTerm> terms;
  int j_peak = 0;             // j with the largest term
  double peak_scale = 0.0;    // 2^{j_peak / 2} t
  double edge_fraction = 0.0; // max(first, last term) / total
  bool truncation_warning = false;
  nlohmann::json to_json() const;
};

std::pair<int, int> hormander_default_range(double t, const BarrierPotential& pot, bool doubled = false);

HormanderResult hormander_integral(const Symbol& m, double y, double ybar, const BarrierPotential& pot,
                                   const HormanderOptions& opt = {});

// sup |lambda m'(lambda)| by central differences at log-spaced lambda
double mikhlin_constant(const Symbol& m, double lambda_lo = 1e-6, double lambda_hi = 1e6, int samples = 2401);

struct MultiplierSpec {
  Symbol m;
  std::string label;
  double mikhlin_constant = 0.0;
  double sup_abs = 0.0; // sup |m| over the same samples
};

MultiplierSpec make_multiplier(const Symbol& m, const std::string& label = "");

struct MultiplierNorm {
  double p = 2.0;
  double lp_ratio = 0.0;    // max ||m(H) f||_p / ||f||_p over the family
  double besov_ratio = 0.0; // max ||m(H) f||_B / ||f||_B (0 when not requested)
  int worst_lp = -1, worst_besov = -1;
  nlohmann::json to_json() const;
};

// family needs at least 20 members
MultiplierNorm multiplier_operator_norm(const MultiplierSpec& spec, double p, const std::vector<Vec>& family,
                                        const SpectralBasis& basis, const BesovParams* besov = nullptr,
                                        const DyadicSystem* sys = nullptr);

struct BesovRatio {
  BesovParams params;
  double ratio = 0.0; // max over the family of ||m(H) f||_B / ||f||_B
  int worst = -1;
};

// same ratio for many parameter sets that differ only in alpha, p and q;
// band norms are computed once per p
std::vector<BesovRatio> multiplier_besov_ratios(const MultiplierSpec& spec, const std::vector<Vec>& family,
                                                const SpectralBasis& basis, const DyadicSystem& sys,
                                                const std::vector<BesovParams>& params);

} // namespace barrier
