#pragma once

#include <climits>

namespace barrier {

// V(x) = epsilon^2 on [-1, 1], zero elsewhere. epsilon == 0 is only
// reachable through free(), which switches every routine to plane waves.
class BarrierPotential {
public:
  explicit BarrierPotential(double epsilon);
  static BarrierPotential free();

  double epsilon() const noexcept { return epsilon_; }
  bool is_free() const noexcept { return free_; }

  // J = 4 + floor(2 log2 epsilon); INT_MIN for the free operator
  int j_threshold() const noexcept;

  double operator()(double x) const noexcept;

private:
  BarrierPotential() = default;
  double epsilon_ = 0.0;
  bool free_ = true;
};

} // namespace barrier
