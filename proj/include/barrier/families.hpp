#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "barrier/transform.hpp"

namespace barrier {

struct TestFunction {
  std::string name;
  std::function<cplx(double)> fn;
};

// modulated Gaussian exp(-(x - x0)^2 / (2 sigma^2)) e^{i k0 x}
TestFunction gaussian(double x0, double sigma, double k0 = 0.0);

// deterministic family of `count` modulated Gaussians with varied width,
// center and frequency; every member is below 1e-10 for |x| >= 14
std::vector<TestFunction> standard_family(int count);
// modulated Gaussians with sigma in [0.6, 1.8], center in [-3, 3],
// frequency in [-3, 3], drawn from mt19937_64(seed)
std::vector<TestFunction> random_family(int count, std::uint64_t seed);

Vec sample(const TestFunction& f, const std::vector<double>& x);

// chi(H) v with chi = sum of (phi psi)_j over bands j <= j_top: spectrally
// supported in lambda <= 2^j_top
Vec band_limit(const Vec& v, const SpectralBasis& basis, const DyadicSystem& sys, int j_top);

// e^{-H / lambda_c} v; with lambda_c = xi_max^2 / 28 the spectral content
// beyond the grid coverage is below 1e-12 and the result decays like a Gaussian
Vec heat_smooth(const Vec& v, const SpectralBasis& basis, double lambda_c);
Vec sample(const TestFunction& f, const SpatialGrid& grid);

} // namespace barrier
