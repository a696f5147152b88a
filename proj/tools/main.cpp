// barrier: batch front end for the eigenfunction, kernel, Besov, decay,
// multiplier and evolution experiments.
//
//   barrier <command> [options]      see barrier <command> --help
//
// Exit codes: 0 all invariants hold, 1 bad usage or config, 2 an invariant
// failed, 3 a resolution or truncation diagnostic was exceeded.
#include <functional>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "barrier/errors.hpp"
#include "commands.hpp"

using cli::json;

namespace {

const char* const kCommands[] = {"eigen", "kernel", "besov", "decay", "sizes", "hormander", "multiplier", "evolve"};

// flag -> JSON pointer into the run config, applied only when given
class Overrides {
public:
  template <class T, class Conv>
  void bind(CLI::App* app, const std::string& flag, const std::string& ptr, const std::string& desc, Conv conv) {
    auto v = std::make_shared<T>();
    auto* opt = app->add_option(flag, *v, desc);
    apply_.push_back([v, opt, ptr, conv](json& c) {
      if (opt->count()) c[json::json_pointer(ptr)] = conv(*v);
    });
  }
  template <class T>
  void bind(CLI::App* app, const std::string& flag, const std::string& ptr, const std::string& desc) {
    bind<T>(app, flag, ptr, desc, [](const T& v) { return json(v); });
  }
  void flag(CLI::App* app, const std::string& flag, const std::string& ptr, const std::string& desc, bool value = true) {
    auto* opt = app->add_flag(flag, desc);
    apply_.push_back([opt, ptr, value](json& c) {
      if (opt->count()) c[json::json_pointer(ptr)] = value;
    });
  }
  void apply(json& c) const {
    for (const auto& f : apply_) f(c);
  }

private:
  std::vector<std::function<void(json&)>> apply_;
};

json range(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("expected lo:hi, got " + s);
  return json::array({std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))});
}

json exponent(const std::string& s) { return s == "inf" ? json("inf") : json(std::stod(s)); }

json exponents(const std::vector<std::string>& v) {
  json a = json::array();
  for (const auto& s : v) a.push_back(exponent(s));
  return a;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Littlewood-Paley experiments for a square barrier Schrodinger operator"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides ov;

  std::string config_path, out_dir;
  int threads = 1;
  std::optional<double> epsilon;
  bool free_op = false;
  app.add_option("--config", config_path, "JSON run config; flags override it");
  app.add_option("--out", out_dir, "output directory (default out/<command>)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--epsilon", epsilon, "barrier height is epsilon^2")->check(CLI::PositiveNumber);
  app.add_flag("--free", free_op, "free operator -d^2/dx^2");
  ov.bind<int>(&app, "--refine", "/refine", "density multiplier for grids and quadrature");
  ov.bind<double>(&app, "--extent", "/grid/extent", "spatial grid half-width");
  ov.bind<int>(&app, "--points-per-unit", "/grid/points_per_unit", "spatial grid density");
  ov.bind<double>(&app, "--xi-max", "/spectral/xi_max", "spectral grid cutoff");
  ov.bind<std::string>(&app, "--system", "/system/family", "dyadic family: exp-bump or log-bump-asym");
  ov.bind<int>(&app, "--smoothness", "/system/smoothness", "dyadic smoothness order");
  ov.bind<std::string>(&app, "--family", "/family/kind", "test family: standard or random");
  ov.bind<int>(&app, "--family-size", "/family/size", "number of test functions");
  ov.bind<std::uint64_t>(&app, "--seed", "/family/seed", "seed for the random family");

  auto* eigen = app.add_subcommand("eigen", "eigenfunction tables, coefficients and residuals");
  ov.bind<std::string>(eigen, "--xi-range", "/eigen/xi_range", "lo:hi", range);
  ov.bind<int>(eigen, "--xi-count", "/eigen/xi_count", "log-spaced frequencies");
  ov.bind<std::string>(eigen, "--x-range", "/eigen/x_range", "lo:hi", range);
  ov.bind<std::string>(eigen, "--check", "/eigen/check", "transfer-matrix");

  auto* kernel = app.add_subcommand("kernel", "kernel matrix of phi_j(H) with symmetry and convergence residuals");
  ov.bind<int>(kernel, "--j", "/kernel/j", "band index, 0 for the local-energy head");
  ov.bind<std::string>(kernel, "--symbol", "/kernel/symbol", "band, dual or product");
  ov.bind<int>(kernel, "--points", "/kernel/points", "points per axis");
  ov.bind<double>(kernel, "--x-extent", "/kernel/x_extent", "points span [-X, X]");
  ov.flag(kernel, "--binary", "/kernel/binary", "also write kernel.bin with a JSON sidecar");

  auto* besov = app.add_subcommand("besov", "Besov norms on the H scale");
  ov.bind<double>(besov, "--alpha", "/besov/alpha", "smoothness");
  ov.bind<std::string>(besov, "--p", "/besov/p", "integrability", exponent);
  ov.bind<std::string>(besov, "--q", "/besov/q", "summability, number or inf", exponent);
  ov.flag(besov, "--homogeneous", "/besov/homogeneous", "homogeneous norm");
  ov.bind<int>(besov, "--j-min", "/besov/j_min", "lowest band of the homogeneous norm");
  ov.flag(besov, "--compare-classical", "/besov/compare_classical", "compare with the FFT Littlewood-Paley norm");
  ov.flag(besov, "--no-smooth", "/besov/smooth", "use raw samples instead of heat-smoothed ones", false);

  auto* decay = app.add_subcommand("decay", "kernel decay fits against the shifted envelope");
  ov.bind<int>(decay, "--j", "/decay/j", "band index");
  ov.bind<int>(decay, "--n", "/decay/n", "decay exponent");
  ov.flag(decay, "--derivative", "/decay/derivative", "fit d/dx K_j");
  ov.flag(decay, "--local", "/decay/local", "fit the local-energy kernel Phi(H)");
  ov.bind<double>(decay, "--window", "/decay/window", "half-width in kernel scales");
  ov.bind<std::vector<double>>(decay, "--ys", "/decay/ys", "kernel columns");

  auto* sizes = app.add_subcommand("sizes", "lambda-normalized kernel sizes across j");
  ov.bind<int>(sizes, "--j-lo", "/sizes/j_lo", "first band (default J + 2)");
  ov.bind<int>(sizes, "--j-hi", "/sizes/j_hi", "last band (default J + 8)");
  ov.bind<double>(sizes, "--tail-factor", "/sizes/tail_factor", "tail radius in units of lambda");

  auto* horm = app.add_subcommand("hormander", "Hormander integrals of m(H) kernels");
  ov.bind<std::string>(horm, "--multiplier", "/hormander/multiplier", "identity, resolvent or power:<tau>");
  ov.bind<double>(horm, "--y", "/hormander/y", "base point");
  ov.bind<std::vector<double>>(horm, "--t", "/hormander/ts", "offsets |y - ybar|");
  ov.flag(horm, "--no-doubling-check", "/hormander/doubling_check", "skip the doubled j range", false);

  auto* mult = app.add_subcommand("multiplier", "L^p and Besov operator norms of m(H) on a test family");
  ov.bind<std::string>(mult, "--multiplier", "/multiplier/multiplier", "identity, resolvent or power:<tau>");
  ov.bind<std::vector<double>>(mult, "--p", "/multiplier/ps", "exponents");
  ov.bind<std::vector<double>>(mult, "--alpha", "/multiplier/alphas", "Besov smoothness values");
  ov.bind<std::vector<std::string>>(mult, "--q", "/multiplier/qs", "Besov q values (inf allowed)", exponents);
  ov.flag(mult, "--no-besov", "/multiplier/besov", "L^p ratios only", false);

  auto* evolve = app.add_subcommand("evolve", "Schrodinger evolution, spectral and Crank-Nicolson");
  ov.bind<std::vector<double>>(evolve, "--t", "/evolve/ts", "times");
  ov.bind<std::string>(evolve, "--method", "/evolve/method", "spectral, fd or both");
  ov.bind<double>(evolve, "--x0", "/evolve/x0", "packet center");
  ov.bind<double>(evolve, "--sigma", "/evolve/sigma", "packet width");
  ov.bind<double>(evolve, "--k0", "/evolve/k0", "packet frequency");
  ov.bind<double>(evolve, "--dt", "/evolve/dt", "Crank-Nicolson step");
  ov.bind<int>(evolve, "--fd-refine", "/evolve/fd_refine", "FD spacing = grid spacing / this");
  ov.flag(evolve, "--no-richardson", "/evolve/richardson", "single dt run", false);
  ov.flag(evolve, "--smoothing", "/evolve/smoothing", "also run the Besov smoothing sweep");
  ov.bind<std::vector<double>>(evolve, "--smoothing-p", "/evolve/smoothing_params/ps", "sweep exponents");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::string cmd = app.get_subcommands().front()->get_name();
  json cfg;
  try {
    cfg = cli::default_config();
    cli::merge(cfg, cli::command_defaults(cmd));
    if (!config_path.empty()) {
      json file = cli::load_config(config_path);
      cli::merge(cfg, file);
    }
    for (const char* c : kCommands)
      if (cmd != c) cfg.erase(c);
    ov.apply(cfg);
    if (free_op) cfg["potential"] = {{"free", true}, {"epsilon", 0.0}};
    if (epsilon) cfg["potential"] = {{"free", false}, {"epsilon", *epsilon}};
    if (cfg.value("refine", 1) < 1) throw std::invalid_argument("refine must be >= 1");
    cli::potential_of(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  cli::Report rep(cmd, cfg, out_dir.empty() ? "out/" + cmd : out_dir);
  try {
    cli::run_command(cmd, cfg, rep, threads);
  } catch (const barrier::ResolutionError& e) {
    rep.error(std::string("resolution: ") + e.what(), cli::Check::resolution);
  } catch (const barrier::InvariantError& e) {
    rep.error(std::string("invariant: ") + e.what(), cli::Check::hard);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rep.finish();
}
