// Distorted Fourier transform: Plancherel, inversion, functional calculus,
// kernels by two independent routes.
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "barrier/errors.hpp"
#include "barrier/families.hpp"
#include "barrier/transform.hpp"

using namespace barrier;

namespace {

struct Setup {
  BarrierPotential pot;
  SpatialGrid grid;
  SpectralGrid sg;
  SpectralBasis basis;
  explicit Setup(BarrierPotential p, double xi_max = 32.0, int ppu = 32)
      : pot(p), grid(SpatialGrid::symmetric(16.0, ppu)),
        sg(SpectralGrid::build(p, {.xi_max = xi_max, .x_extent = 16.0})), basis(pot, grid, sg) {}
};

Setup& barrier1() {
  static Setup s(BarrierPotential(1.0));
  return s;
}

// trapezoid error at the kinks of e(., xi) is O(h^4); h = 1/64 keeps it near 1e-8
Setup& barrier1_fine() {
  static Setup s(BarrierPotential(1.0), 32.0, 64);
  return s;
}

} // namespace

TEST_CASE("spectral grid: breakpoints, node rule, hash") {
  BarrierPotential pot(1.5);
  auto sg = SpectralGrid::build(pot, {.xi_max = 4.0, .x_extent = 5.0});
  bool has_eps = false;
  for (const auto& p : sg.panels()) {
    CHECK(p.hi - p.lo <= 1.0 + 1e-12);
    CHECK(p.nodes >= SpectralGrid::required_nodes(p, 5.0, 0.0));
    if (std::abs(p.hi - 1.5) < 1e-15) has_eps = true;
  }
  CHECK(has_eps);
  CHECK(sg.excludes_origin());
  CHECK_THROWS_AS(sg.check_resolution(50.0), ResolutionError);
  auto sg2 = SpectralGrid::build(pot, {.xi_max = 4.0, .x_extent = 5.0});
  CHECK(sg.hash() == sg2.hash());
  CHECK(sg.refined(2, pot).hash() != sg.hash());
}

TEST_CASE("spatial grid puts +-1 on nodes") {
  auto g = SpatialGrid::symmetric(16.0, 32);
  CHECK(g.n == 1025);
  bool p1 = false, m1 = false;
  for (double x : g.points()) {
    if (x == 1.0) p1 = true;
    if (x == -1.0) m1 = true;
  }
  CHECK((p1 && m1));
  CHECK_THROWS(SpatialGrid(-2, 2, 100).validate());
}

TEST_CASE("Plancherel on the standard family") {
  auto& S = barrier1();
  double worst = 0.0;
  for (const auto& f : standard_family(10)) {
    Vec v = sample(f, S.grid);
    std::vector<std::string> warn;
    Vec F = S.basis.forward(v, &warn);
    CHECK(warn.empty());
    double r = S.basis.spectral_l2(F) / S.basis.spatial_l2(v);
    worst = std::max(worst, std::abs(r * r - 1.0));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("dyadic reconstruction of band-covered functions") {
  auto& S = barrier1_fine();
  auto sys = build_system(SystemKind::inhomogeneous, "exp-bump");
  double worst = 0.0;
  for (const auto& f : standard_family(10)) {
    Vec v = heat_smooth(sample(f, S.grid), S.basis, 32.0 * 32.0 / 28.0);
    Vec F = S.basis.forward(v);
    Vec sum = Vec::Zero(v.size());
    for (int j = 0; j <= 10; ++j) sum += S.basis.adjoint(S.basis.symbol_values(product_symbol(sys, j)).cwiseProduct(F));
    worst = std::max(worst, (sum - v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("raw Gaussians are not band-limited for H") {
  // the transform of smooth data decays like xi^-3 because of the edges
  auto& S = barrier1();
  Vec v = sample(gaussian(0.0, 1.0), S.grid);
  Vec F = S.basis.forward(v);
  CHECK(std::abs(F(0)) > 1e-7);
  Setup Sf(BarrierPotential::free());
  CHECK(std::abs(Sf.basis.forward(v)(0)) < 1e-12);
}

TEST_CASE("free forward transform is the Fourier transform") {
  Setup S(BarrierPotential::free());
  auto f = gaussian(0.5, 1.0, 0.0);
  Vec F = S.basis.forward(sample(f, S.grid));
  const auto& xi = S.sg.nodes();
  double worst = 0.0;
  for (int m = 0; m < S.sg.size(); m += 37) {
    cplx exact = std::exp(-0.5 * xi[m] * xi[m]) * std::polar(1.0, -0.5 * xi[m]);
    worst = std::max(worst, std::abs(F(m) - exact));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("functional calculus is a homomorphism") {
  auto& S = barrier1_fine();
  Symbol a{[](double l) { return cplx(std::exp(-l / 40.0)); }, "gauss"};
  // pole at -16: resolvent tails decay like e^{-4|x|}
  Symbol b{[](double l) { return cplx(l / (16.0 + l)); }, "l/(16+l)"};
  double worst = 0.0;
  for (const auto& f : standard_family(5)) {
    Vec v = heat_smooth(sample(f, S.grid), S.basis, 32.0 * 32.0 / 28.0);
    Vec ab = S.basis.apply_symbol(a * b, v);
    Vec seq = S.basis.apply_symbol(a, S.basis.apply_symbol(b, v));
    worst = std::max(worst, (ab - seq).cwiseAbs().maxCoeff() / ab.cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("adjoint_at reproduces adjoint on grid points") {
  auto& S = barrier1();
  Vec v = sample(gaussian(0.3, 0.9, 1.0), S.grid);
  Vec F = S.basis.forward(v);
  Vec a = S.basis.adjoint(F);
  std::vector<double> pts{S.grid.point(100), S.grid.point(512), S.grid.point(530)};
  Vec b = S.basis.adjoint_at(F, pts);
  CHECK(std::abs(b(0) - a(100)) <= 1e-12);
  CHECK(std::abs(b(1) - a(512)) <= 1e-12);
  CHECK(std::abs(b(2) - a(530)) <= 1e-12);
}

TEST_CASE("kernel applied by quadrature equals functional calculus") {
  auto& S = barrier1();
  auto sys = build_system(SystemKind::inhomogeneous, "exp-bump");
  Symbol m = band_symbol(sys, 4);
  auto x = S.grid.points();
  std::vector<double> ys;
  for (int i = 0; i < S.grid.n; ++i) ys.push_back(x[i]);
  Vec v = sample(gaussian(-0.4, 0.8, 1.0), S.grid);
  auto K = kernel_matrix(m, {x[400], x[512], x[700]}, ys, S.sg, S.pot);
  auto w = S.grid.weights();
  Vec direct = S.basis.apply_symbol(m, v);
  int idx[] = {400, 512, 700};
  for (int r = 0; r < 3; ++r) {
    cplx s = 0.0;
    for (int k = 0; k < S.grid.n; ++k) s += w[k] * K.values(r, k) * v(k);
    CHECK(std::abs(s - direct(idx[r])) <= 1e-7);
  }
}

TEST_CASE("kernel invariants: Hermitian and reflection symmetric") {
  BarrierPotential pot(1.0);
  auto sys = build_system(SystemKind::inhomogeneous, "exp-bump");
  auto sg = SpectralGrid::build(pot, {.xi_max = 8.0, .x_extent = 6.0});
  std::vector<double> pts;
  for (int i = 0; i <= 48; ++i) pts.push_back(-6.0 + 12.0 * i / 48);
  for (int j : {0, 2, 5}) {
    auto K = kernel_matrix(band_symbol(sys, j), pts, pts, sg, pot);
    int n = static_cast<int>(pts.size());
    double herm = 0.0, refl = 0.0, peak = K.values.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        herm = std::max(herm, std::abs(K.values(i, k) - std::conj(K.values(k, i))));
        refl = std::max(refl, std::abs(K.values(i, k) - K.values(n - 1 - i, n - 1 - k)));
      }
    CHECK(herm <= 1e-12 * peak);
    CHECK(refl <= 1e-12 * peak);
  }
}

TEST_CASE("symbol outside grid coverage is rejected") {
  BarrierPotential pot(1.0);
  auto sg = SpectralGrid::build(pot, {.xi_max = 4.0, .x_extent = 4.0});
  CHECK_THROWS_AS(kernel_matrix(identity_symbol(), {0.0}, {0.0}, sg, pot), std::domain_error);
  auto sys = build_system(SystemKind::inhomogeneous, "exp-bump");
  CHECK_THROWS_AS(kernel_matrix(band_symbol(sys, 8), {0.0}, {0.0}, sg, pot), std::domain_error);
  CHECK_THROWS_AS(kernel_matrix(band_symbol(sys, 2), {0.0}, {30.0}, sg, pot), ResolutionError);
}

TEST_CASE("plane-wave synthesis agrees with Gauss-Legendre kernels") {
  auto sys = build_system(SystemKind::homogeneous, "exp-bump", 2, -40, 40);
  for (double eps : {0.0, 1.0}) {
    BarrierPotential pot = eps == 0.0 ? BarrierPotential::free() : BarrierPotential(eps);
    for (int j : {1, 4, 7}) {
      Symbol m = product_symbol(sys, j);
      double xlo = std::sqrt(sys.band_lower(j)), xhi = std::sqrt(sys.band_upper(j));
      std::vector<double> ys{-2.3, 0.4, 3.1};
      // the period must hold the slowly decaying kernel tail, ~5000 band scales
      double pf = 1.0 + 5000.0 * std::ldexp(1.0, -j / 2) / 24.0;
      auto cols = synthesize_kernel_columns(m, xlo, xhi, ys, pot, -12.0, 12.0, 0.01, pf);
      auto sg = SpectralGrid::build(pot, {.xi_max = xhi, .xi_min = xlo, .x_extent = 12.0, .max_panel_width = 0.5});
      std::vector<double> xs;
      std::vector<int> idx;
      for (int i = 0; i < cols.n; i += 97) {
        xs.push_back(cols.point(i));
        idx.push_back(i);
      }
      auto K = kernel_matrix(m, xs, ys, sg, pot);
      double peak = K.values.cwiseAbs().maxCoeff(), worst = 0.0;
      for (std::size_t r = 0; r < xs.size(); ++r)
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(K.values(r, c) - cols.cols[c](idx[r])));
      INFO("eps=" << eps << " j=" << j);
      CHECK(worst <= 1e-8 * peak);
    }
  }
}

TEST_CASE("plane-wave derivative kernels agree with Gauss-Legendre") {
  auto sys = build_system(SystemKind::homogeneous, "exp-bump", 2, -40, 40);
  BarrierPotential pot(1.0);
  int j = 4;
  Symbol m = product_symbol(sys, j);
  double xlo = std::sqrt(sys.band_lower(j)), xhi = std::sqrt(sys.band_upper(j));
  std::vector<double> ys{-2.3, 0.4, 3.1};
  double pf = 1.0 + 5000.0 * std::ldexp(1.0, -j / 2) / 24.0;
  auto sg = SpectralGrid::build(pot, {.xi_max = xhi, .xi_min = xlo, .x_extent = 12.0, .max_panel_width = 0.5});
  for (auto d : {KernelDerivative::dx, KernelDerivative::dy}) {
    auto cols = synthesize_kernel_columns(m, xlo, xhi, ys, pot, -12.0, 12.0, 0.01, pf, d);
    std::vector<double> xs;
    std::vector<int> idx;
    for (int i = 0; i < cols.n; i += 89) {
      if (std::abs(std::abs(cols.point(i)) - 1.0) < 0.02) continue; // dx kernel jumps in slope at +-1 only
      xs.push_back(cols.point(i));
      idx.push_back(i);
    }
    auto K = kernel_matrix(m, xs, ys, sg, pot, d);
    double peak = K.values.cwiseAbs().maxCoeff(), worst = 0.0;
    for (std::size_t r = 0; r < xs.size(); ++r)
      for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(K.values(r, c) - cols.cols[c](idx[r])));
    CHECK(worst <= 1e-8 * peak);
  }
}

TEST_CASE("kernel export writes csv, binary and sidecar") {
  BarrierPotential pot(1.0);
  auto sys = build_system(SystemKind::inhomogeneous, "exp-bump");
  auto sg = SpectralGrid::build(pot, {.xi_max = 4.0, .x_extent = 3.0});
  auto K = kernel_matrix(band_symbol(sys, 2), {0.0, 0.5}, {-1.0, 0.0, 1.0}, sg, pot);
  auto dir = std::filesystem::temp_directory_path();
  auto csv = (dir / "kernel_test.csv").string(), bin = (dir / "kernel_test.bin").string();
  K.write_csv(csv);
  K.write_binary(bin);
  std::FILE* f = std::fopen(bin.c_str(), "rb");
  REQUIRE(f);
  std::fseek(f, 0, SEEK_END);
  CHECK(std::ftell(f) == 2 * 3 * 8);
  std::fclose(f);
  std::FILE* side = std::fopen((bin + ".json").c_str(), "r");
  CHECK(side != nullptr);
  if (side) std::fclose(side);
}
