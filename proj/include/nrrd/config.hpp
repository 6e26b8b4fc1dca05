#pragma once

#include <string>
#include <vector>

#include "nrrd/grid.hpp"
#include "nrrd/params.hpp"

namespace nrrd {

enum class Command { eig, steady, evolve, threshold1, threshold2, sweep, check };
enum class InitialKind { zero, scaled_steady, file, expression };

struct GridSpec {
  int dim = 1;
  int nx = 201, ny = 65;
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;

  GridPtr build() const;
};

struct InitialSpec {
  InitialKind kind = InitialKind::scaled_steady;
  std::string path;            // kind == file
  std::string expr_u1 = "0";   // kind == expression
  std::string expr_u2 = "0";
};

// Full description of one CLI run. Parsed from a strict `key = value` text
// with [section] headers; see parse_config for the exact key set.
struct RunConfig {
  Command command = Command::evolve;
  Params params;
  GridSpec grid;
  SolverOptions solver;
  InitialSpec initial;
  std::string outdir = "out";
  double t_end = 10.0;
  double cutoff_m = 0.0;  // 0 disables the reaction clamp
  double seed_scale = 4.0;
  double l1 = 0.5, l2 = 0.75;
  std::string sweep_axis = "a";
  std::vector<double> sweep_values;
};

// Strict parser: unknown sections or keys, duplicate keys, malformed values
// and constraint violations all raise ConfigError carrying the line number.
// The [problem] section is mandatory.
RunConfig parse_config(const std::string& text);

// Canonical serialization: fixed section and key order, round-trip-exact
// value formatting. parse(serialize(c)) reproduces c, and serializing again
// reproduces the same text.
std::string serialize_config(const RunConfig& cfg);

const char* command_name(Command c);
const char* initial_kind_name(InitialKind k);

}  // namespace nrrd
