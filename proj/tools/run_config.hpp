#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "barrier/besov.hpp"
#include "barrier/dyadic.hpp"
#include "barrier/families.hpp"
#include "barrier/grid.hpp"
#include "barrier/potential.hpp"

namespace cli {

using json = nlohmann::json;

// Run configuration: shared blocks plus one block per subcommand.
//   potential {epsilon | free}, grid {extent, points_per_unit},
//   spectral {xi_max, density}, system {family, smoothness},
//   family {kind: standard | random, size, seed}, refine, <command> {...}
// Only the config goes into the hash; threads and the output directory do not
// change any output and are kept out of it.
json default_config();
json load_config(const std::string& path); // merged over the defaults
void merge(json& into, const json& from);
std::string config_hash(const json& cfg);

barrier::BarrierPotential potential_of(const json& cfg);
barrier::SpatialGrid grid_of(const json& cfg);
barrier::SpectralGridOptions spectral_options_of(const json& cfg, double phase_time = 0.0);
barrier::DyadicSystem system_of(const json& cfg, barrier::SystemKind kind = barrier::SystemKind::inhomogeneous);
std::vector<barrier::TestFunction> family_of(const json& cfg);

// reads q from a number or the string "inf"
double read_exponent(const json& v);
json write_exponent(double q);

enum class Check { hard, resolution };

struct Invariant {
  std::string name;
  double value;
  double limit;
  bool pass;
  Check kind;
};

class Report {
public:
  Report(std::string command, json cfg, std::filesystem::path out);

  // value <= limit
  bool check(const std::string& name, double value, double limit, Check kind = Check::hard);
  // lo <= value <= hi, reported against hi
  bool check_range(const std::string& name, double value, double lo, double hi, Check kind = Check::hard);
  void flag(const std::string& name, bool ok, Check kind = Check::resolution);
  void error(const std::string& what, Check kind);

  json& results() { return results_; }
  const std::filesystem::path& out() const { return out_; }
  std::filesystem::path file(const std::string& name) const { return out_ / name; }

  // 0 pass, 2 hard failure, 3 resolution or truncation diagnostic
  int exit_code() const;
  // writes report.json and prints a one-line summary per invariant
  int finish();

private:
  std::string command_;
  json cfg_;
  std::filesystem::path out_;
  json results_ = json::object();
  std::vector<Invariant> checks_;
  std::vector<std::pair<std::string, Check>> errors_;
};

} // namespace cli
