#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "barrier/potential.hpp"

namespace barrier {

// Uniform grid x_i = x_min + i h, i = 0..n-1, trapezoid weights.
struct SpatialGrid {
  double x_min = -16.0, x_max = 16.0;
  int n = 1025;

  SpatialGrid() = default;
  SpatialGrid(double lo, double hi, int count);

  // [-L, L] with points_per_unit points per unit length; +-1 are nodes
  static SpatialGrid symmetric(double half_width, int points_per_unit);

  double h() const { return (x_max - x_min) / (n - 1); }
  double point(int i) const { return x_min + i * h(); }
  std::vector<double> points() const;
  std::vector<double> weights() const;
  double extent() const;  // max |x|
  SpatialGrid refined(int factor) const;
  void validate() const; // covers [-3, 3], at least 64 points
  nlohmann::json to_json() const;
};

struct Panel {
  double lo, hi;
  int nodes;
};

struct SpectralGridOptions {
  double xi_max = 32.0;
  double xi_min = 0.0;          // > 0 restricts to xi_min <= |xi| <= xi_max
  double x_extent = 16.0;       // max |x| of the points the grid will be used with
  double max_panel_width = 1.0;
  double phase_time = 0.0;      // extra nodes for e^{-i t xi^2}
  double density = 1.0;         // multiplier on the node rule
  bool dyadic_breaks = true;    // break at xi = 2^{k/2}, where dyadic symbols are not analytic
};

// Panels split at 0, +-epsilon and (optionally) +-2^{k/2}; Gauss-Legendre on each panel.
class SpectralGrid {
public:
  static SpectralGrid build(const BarrierPotential& pot, const SpectralGridOptions& opt);

  const std::vector<Panel>& panels() const { return panels_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  double xi_max() const { return opt_.xi_max; }
  const SpectralGridOptions& options() const { return opt_; }
  bool excludes_origin() const;

  // minimum node count per panel for points with |x| <= x_extent and phase t
  static int required_nodes(const Panel& p, double x_extent, double phase_time);
  // throws ResolutionError if some panel is under-resolved
  void check_resolution(double x_extent, double phase_time = 0.0) const;

  SpectralGrid refined(int factor, const BarrierPotential& pot) const;
  std::uint64_t hash() const;
  nlohmann::json to_json() const;

private:
  SpectralGridOptions opt_;
  std::vector<Panel> panels_;
  std::vector<double> nodes_, weights_;
};

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ull);

} // namespace barrier
