#pragma once

// Experiment runner behind the edp-gibbs CLI: configuration, result tables,
// CSV/manifest emission.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edp/spec_io.hpp"

namespace edp {

enum class Experiment { DensityCheck, Tilt, Edgeworth, ConditionalTv, Tail, Exceedance, Democracy };

const char* to_string(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& name);

struct ASchedule {
  enum class Kind { Fixed, Power, Log };
  Kind kind = Kind::Fixed;
  std::vector<double> values{3.0};  // Fixed: one row per value and n
  double c = 1.0;
  double alpha = 0.25;

  // Values of a_n for this n.
  std::vector<double> at(int n) const;
  std::string describe() const;
};

// "fixed:3", "fixed:2,3,4", "power:c=1,alpha=0.25", "log:c=1".
ASchedule parse_a_schedule(const std::string& text);

struct SimConfig {
  SpecDocument spec = parse_spec_argument("weibull:k=2");
  Experiment experiment = Experiment::Tilt;
  std::vector<int> n_list{16};
  ASchedule a_schedule;
  std::vector<double> t_list{1.0, 10.0, 100.0, 1000.0};
  double epsilon = 1.0;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::size_t grid_points = std::size_t{1} << 14;
  double grid_lo = -40.0;
  double grid_hi = 40.0;
  std::string out_dir = ".";

  // Canonical JSON of everything that affects numeric output.
  std::string canonical_json() const;
  // FNV-1a 64 of canonical_json(), as 16 hex digits.
  std::string hash() const;
};

using Cell = std::variant<double, std::int64_t, std::string>;

struct ResultTable {
  std::string name;
  std::vector<std::string> headers;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_number(double v);

// CSV with a trailing config_hash column on every row.
std::string to_csv(const ResultTable& table, const std::string& config_hash);

std::vector<ResultTable> run_experiment(const SimConfig& config);

struct RunSummary {
  std::vector<std::string> files;  // relative to out_dir
  double wall_seconds = 0.0;
};

// Runs the experiment, writes one CSV per table and manifest.json into
// out_dir. Library errors propagate as edp::Error.
RunSummary run(const SimConfig& config);

// 0 ok, 1 usage, 2 precondition, 3 numeric failure.
int exit_code_for(const std::exception& e);

}  // namespace edp
