#pragma once

#include <vector>

#include <Eigen/Dense>

#include "barrier/besov.hpp"

namespace barrier::oracle {

struct ClassicalOptions {
  // f is zero-padded to pad times the grid length before the FFT. Band
  // kernels decay only like exp(-c sqrt|x|), so pad = 1 (plain periodic
  // extension) aliases their tails back into the window at the 1e-3 level.
  int pad = 32;
  // L^p norm over the original grid only (trapezoid weights), the region the
  // spatial band functions of besov_norm live on
  bool window_only = false;
};

// Littlewood-Paley pieces of the free Laplacian by FFT, symbols
// phi_j(xi^2) from the given dyadic system.
std::vector<BandNorm> classical_band_norms(const Eigen::VectorXcd& f, const SpatialGrid& grid, const DyadicSystem& sys,
                                           double p, int j_lo, int j_hi, const ClassicalOptions& opt = {});

BesovResult classical_besov_norm(const Eigen::VectorXcd& f, const SpatialGrid& grid, const BesovParams& prm,
                                 const DyadicSystem& sys, int j_hi, const ClassicalOptions& opt = {});

} // namespace barrier::oracle
