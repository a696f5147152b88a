#include "run_config.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace cli {

json default_config() {
  return {{"potential", {{"epsilon", 1.0}, {"free", false}}},
          {"grid", {{"extent", 16.0}, {"points_per_unit", 32}}},
          {"spectral", {{"xi_max", 32.0}, {"density", 1.0}}},
          {"system", {{"family", "exp-bump"}, {"smoothness", 2}}},
          {"family", {{"kind", "standard"}, {"size", 5}, {"seed", 1}}},
          {"refine", 1}};
}

void merge(json& into, const json& from) {
  for (auto it = from.begin(); it != from.end(); ++it) {
    if (it.value().is_object() && into.contains(it.key()) && into[it.key()].is_object())
      merge(into[it.key()], it.value());
    else
      into[it.key()] = it.value();
  }
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path);
  json cfg = default_config();
  merge(cfg, json::parse(in));
  return cfg;
}

std::string config_hash(const json& cfg) {
  std::string s = cfg.dump();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(barrier::fnv1a(s.data(), s.size())));
  return buf;
}

barrier::BarrierPotential potential_of(const json& cfg) {
  const auto& p = cfg.at("potential");
  if (p.value("free", false)) return barrier::BarrierPotential::free();
  return barrier::BarrierPotential(p.at("epsilon").get<double>());
}

barrier::SpatialGrid grid_of(const json& cfg) {
  const auto& g = cfg.at("grid");
  int ppu = g.at("points_per_unit").get<int>() * cfg.value("refine", 1);
  auto grid = barrier::SpatialGrid::symmetric(g.at("extent").get<double>(), ppu);
  grid.validate();
  return grid;
}

barrier::SpectralGridOptions spectral_options_of(const json& cfg, double phase_time) {
  const auto& s = cfg.at("spectral");
  barrier::SpectralGridOptions o;
  o.xi_max = s.at("xi_max").get<double>();
  o.density = s.at("density").get<double>() * cfg.value("refine", 1);
  o.x_extent = cfg.at("grid").at("extent").get<double>();
  o.phase_time = phase_time;
  return o;
}

barrier::DyadicSystem system_of(const json& cfg, barrier::SystemKind kind) {
  const auto& s = cfg.at("system");
  return barrier::build_system(kind, s.at("family").get<std::string>(), s.at("smoothness").get<int>());
}

std::vector<barrier::TestFunction> family_of(const json& cfg) {
  const auto& f = cfg.at("family");
  int n = f.at("size").get<int>();
  if (n < 1) throw std::invalid_argument("family size must be positive");
  auto kind = f.at("kind").get<std::string>();
  if (kind == "standard") return barrier::standard_family(n);
  if (kind == "random") return barrier::random_family(n, f.at("seed").get<std::uint64_t>());
  throw std::invalid_argument("unknown family kind " + kind);
}

double read_exponent(const json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return barrier::kInf;
    return std::stod(v.get<std::string>());
  }
  return v.get<double>();
}

json write_exponent(double q) { return std::isinf(q) ? json("inf") : json(q); }

Report::Report(std::string command, json cfg, std::filesystem::path out)
    : command_(std::move(command)), cfg_(std::move(cfg)), out_(std::move(out)) {
  std::filesystem::create_directories(out_);
}

bool Report::check(const std::string& name, double value, double limit, Check kind) {
  bool ok = value <= limit; // NaN fails
  checks_.push_back({name, value, limit, ok, kind});
  return ok;
}

bool Report::check_range(const std::string& name, double value, double lo, double hi, Check kind) {
  bool ok = value >= lo && value <= hi;
  checks_.push_back({name, value, hi, ok, kind});
  return ok;
}

void Report::flag(const std::string& name, bool ok, Check kind) {
  checks_.push_back({name, ok ? 0.0 : 1.0, 0.0, ok, kind});
}

void Report::error(const std::string& what, Check kind) { errors_.emplace_back(what, kind); }

int Report::exit_code() const {
  bool hard = false, res = false;
  for (const auto& c : checks_)
    if (!c.pass) (c.kind == Check::hard ? hard : res) = true;
  for (const auto& [w, k] : errors_) (k == Check::hard ? hard : res) = true;
  return hard ? 2 : res ? 3 : 0;
}

namespace {

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

} // namespace

int Report::finish() {
  json inv = json::array();
  for (const auto& c : checks_)
    inv.push_back({{"name", c.name},
                   {"value", c.value},
                   {"limit", c.limit},
                   {"pass", c.pass},
                   {"kind", c.kind == Check::hard ? "hard" : "resolution"}});
  json errs = json::array();
  for (const auto& [w, k] : errors_) errs.push_back({{"message", w}, {"kind", k == Check::hard ? "hard" : "resolution"}});
  int code = exit_code();
  json r = {{"command", command_}, {"config", cfg_},   {"config_hash", config_hash(cfg_)},
            {"results", results_}, {"invariants", inv}, {"errors", errs},
            {"exit_code", code},   {"timestamp", utc_now()}};
  std::ofstream(file("report.json")) << r.dump(2) << '\n';
  for (const auto& c : checks_)
    std::cout << (c.pass ? "ok    " : c.kind == Check::hard ? "FAIL  " : "WARN  ") << c.name << " = " << c.value
              << " (limit " << c.limit << ")\n";
  for (const auto& [w, k] : errors_) std::cout << (k == Check::hard ? "FAIL  " : "WARN  ") << w << '\n';
  std::cout << command_ << ": exit " << code << ", report " << file("report.json").string() << '\n';
  return code;
}

} // namespace cli
