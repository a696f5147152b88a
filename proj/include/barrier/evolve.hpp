#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "barrier/besov.hpp"
#include "barrier/families.hpp"
#include "barrier/transform.hpp"

namespace barrier {

// e^{-itH} f = F* e^{-it xi^2} F f. Throws ResolutionError when the spectral
// grid does not resolve the phase t xi^2 for the spatial extent, or when Ff
// is not below 1e-8 (relative) at the outermost nodes.
Vec propagate_spectral(const Vec& f, double t, const SpectralBasis& basis);
// same on the spectral side: e^{-it xi^2} Ff
Vec propagate_transform(const Vec& Ff, double t, const SpectralBasis& basis);

struct FdOptions {
  int refine = 4;             // fine spacing = grid spacing / refine
  double extent_factor = 4.0; // FD domain is this many times the grid's
  double dt = 1e-3;
  bool richardson = true;     // combine dt and dt/2
};

struct FdResult {
  Vec psi;                    // on the points of the input grid
  double l2_drift = 0.0;      // | ||psi(t)|| / ||f|| - 1 | on the FD grid
  double max_step_drift = 0.0;
  bool boundary_warning = false; // |psi| above 1e-6 max on the outer 5% of the FD domain
  int steps = 0;
};

// Crank-Nicolson for i psi_t = -psi_xx + V psi, second-order Laplacian, zero
// Dirichlet ends; V(+-1) = eps^2 / 2 on the nodes at the jump
FdResult propagate_fd(const TestFunction& f, double t, const SpatialGrid& grid, const BarrierPotential& pot,
                      const FdOptions& opt = {});

struct EvolutionRun {
  double t = 0.0;
  std::string method; // "spectral" or "crank_nicolson"
  double dt = 0.0;
  double conserved_l2_drift = 0.0;
  bool boundary_warning = false;
  Vec psi;
  nlohmann::json to_json() const; // metadata only
};

// <t> = (1 + t^2)^{1/2}
double japanese_bracket(double t);

// max over the family (given as transforms) of
// ||e^{-itH} f||_{B^{alpha/2, q}_p(H)} / ||f||_{B^{alpha/2 + beta, q}_p(H)},
// beta = |1/2 - 1/p|; alpha is the classical smoothness, halved on the H scale
struct SmoothingPoint {
  double t;
  double ratio;
  int worst;
};

struct SmoothingSweep {
  double alpha = 0.0, p = 2.0, q = 2.0, beta = 0.0;
  std::vector<SmoothingPoint> points;
  double slope = 0.0; // least squares slope of log ratio against log <t>
  nlohmann::json to_json() const;
};

double smoothing_ratio(const std::vector<Vec>& transforms, double t, double alpha, double p, double q,
                       const DyadicSystem& sys, const SpectralBasis& basis, int* worst = nullptr);

SmoothingSweep smoothing_sweep(const std::vector<Vec>& transforms, const std::vector<double>& ts, double alpha,
                               double p, double q, const DyadicSystem& sys, const SpectralBasis& basis);

} // namespace barrier
