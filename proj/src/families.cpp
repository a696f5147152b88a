#include "barrier/families.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace barrier {

TestFunction gaussian(double x0, double sigma, double k0) {
  char name[96];
  std::snprintf(name, sizeof name, "gauss(x0=%g,s=%g,k=%g)", x0, sigma, k0);
  return {name, [=](double x) {
            double d = (x - x0) / sigma;
            return std::polar(std::exp(-0.5 * d * d), k0 * x);
          }};
}

std::vector<TestFunction> standard_family(int count) {
  static const double sig[] = {0.6, 0.8, 1.0, 1.3, 1.7};
  static const double ctr[] = {-2.5, -1.0, 0.0, 0.7, 2.2};
  static const double frq[] = {0.0, 1.5, -2.0, 3.0, 0.7};
  std::vector<TestFunction> out;
  for (int i = 0; i < count; ++i)
    out.push_back(gaussian(ctr[i % 5], sig[(i / 5 + i) % 5], frq[(i * 2 + i / 5) % 5]));
  return out;
}

std::vector<TestFunction> random_family(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sig(0.6, 1.8), ctr(-3.0, 3.0), frq(-3.0, 3.0);
  std::vector<TestFunction> out;
  for (int i = 0; i < count; ++i) {
    // fixed draw order keeps the family reproducible
    double s = sig(rng), c = ctr(rng), k = frq(rng);
    out.push_back(gaussian(c, s, k));
  }
  return out;
}

Vec sample(const TestFunction& f, const std::vector<double>& x) {
  Vec v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v(i) = f.fn(x[i]);
  return v;
}

Vec band_limit(const Vec& v, const SpectralBasis& basis, const DyadicSystem& sys, int j_top) {
  Symbol chi{[sys, j_top](double lam) {
               double s = 0.0;
               for (int j = sys.first_band(); j <= j_top; ++j) s += sys.eval_product(j, lam);
               return cplx(s);
             },
             "band_limit"};
  chi.lambda_hi = std::ldexp(1.0, j_top);
  return basis.apply_symbol(chi, v);
}

Vec heat_smooth(const Vec& v, const SpectralBasis& basis, double lambda_c) {
  Symbol heat{[lambda_c](double lam) { return cplx(std::exp(-lam / lambda_c)); }, "heat"};
  return basis.apply_symbol(heat, v);
}

Vec sample(const TestFunction& f, const SpatialGrid& grid) { return sample(f, grid.points()); }

} // namespace barrier
