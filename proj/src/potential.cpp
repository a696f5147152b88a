#include "barrier/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace barrier {

BarrierPotential::BarrierPotential(double epsilon) : epsilon_(epsilon), free_(false) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("barrier height epsilon must be positive and finite (use free() for 0)");
}

BarrierPotential BarrierPotential::free() { return BarrierPotential(); }

int BarrierPotential::j_threshold() const noexcept {
  if (free_) return INT_MIN;
  return 4 + static_cast<int>(std::floor(2.0 * std::log2(epsilon_)));
}

double BarrierPotential::operator()(double x) const noexcept {
  if (free_) return 0.0;
  return std::abs(x) <= 1.0 ? epsilon_ * epsilon_ : 0.0;
}

} // namespace barrier
