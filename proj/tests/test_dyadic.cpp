// Dyadic systems: support, lower bounds, exact telescoping partition.
#include <doctest.h>

#include <cmath>

#include "barrier/dyadic.hpp"

using namespace barrier;

TEST_CASE("both families pass their own checks") {
  for (const auto& fam : known_families()) {
    auto sys = build_system(SystemKind::inhomogeneous, fam, 2);
    auto rep = check_system(sys);
    CHECK(rep.passed());
    CHECK(rep.partition_error <= 1e-12);
    CHECK(rep.support_head <= 1.0);
    CHECK(rep.support_band_lo >= 0.25);
    CHECK(rep.support_band_hi <= 1.0);
    CHECK(rep.band_lower_bound > 0.0);
  }
}

TEST_CASE("head is exactly one near the origin") {
  auto sys = build_system(SystemKind::inhomogeneous, "exp-bump");
  CHECK(sys.head(0.0) == 1.0);
  CHECK(sys.head(0.3) == 1.0);
  CHECK(sys.head(-0.5) == 1.0);
  CHECK(sys.head(1.0) == 0.0);
  CHECK(sys.eval(3, 1.5) == 0.0); // below band 3
}

TEST_CASE("partition of unity at random and breakpoint lambdas") {
  for (const auto& fam : known_families()) {
    auto sys = build_system(SystemKind::inhomogeneous, fam, 3);
    for (double lam : {0.0, 0.2, 0.5, 0.75, 1.0, 3.3, 64.0, 1000.5, 123456.0})
      CHECK(std::abs(partition_sum(sys, lam) - 1.0) <= 1e-12);
  }
}

TEST_CASE("asymmetric family has phi != psi") {
  auto sys = build_system(SystemKind::inhomogeneous, "log-bump-asym");
  CHECK(std::abs(sys.band(0.6) - sys.band_dual(0.6)) > 1e-3);
  CHECK(sys.band(0.6) * sys.band_dual(0.6) == doctest::Approx(sys.eval_product(1, 1.2)).epsilon(1e-14));
}

TEST_CASE("homogeneous system sums to one away from the origin") {
  auto sys = build_system(SystemKind::homogeneous, "exp-bump", 2, -40, 40);
  for (double lam : {1e-6, 1e-3, 0.7, 5.0, 1e6}) CHECK(std::abs(partition_sum(sys, lam) - 1.0) <= 1e-10);
  CHECK(check_system(sys).passed());
}

TEST_CASE("scaled band fails the partition check") {
  auto sys = build_system(SystemKind::inhomogeneous, "exp-bump").with_band_scale(0.9);
  auto rep = check_system(sys);
  CHECK_FALSE(rep.partition_ok);
  CHECK(rep.partition_error > 0.1);
}

TEST_CASE("descriptor round trip") {
  auto sys = build_system(SystemKind::homogeneous, "log-bump-asym", 4, -12, 20);
  auto back = DyadicSystem::from_descriptor(sys.descriptor());
  CHECK(back.family_id() == "log-bump-asym");
  CHECK(back.smoothness_order() == 4);
  CHECK(back.j_min() == -12);
  CHECK(back.eval(5, 20.0) == sys.eval(5, 20.0));
  CHECK_THROWS(build_system(SystemKind::inhomogeneous, "nope"));
}

TEST_CASE("dilation: phi_j(2^j lambda) does not depend on j") {
  auto sys = build_system(SystemKind::inhomogeneous, "exp-bump");
  for (int j = 1; j < 30; ++j) CHECK(sys.eval(j, std::ldexp(0.55, j)) == sys.band(0.55));
}
