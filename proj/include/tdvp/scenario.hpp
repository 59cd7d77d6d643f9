#pragma once

// Scenario files, subcommand execution and table emission for the CLI.
//
// Config format: UTF-8 `key = value` lines, `#` starts a comment. Trap
// parameters use the `trap.` prefix (SI units unless `units = dimensionless`),
// run parameters the `run.` prefix. Unknown or repeated keys are rejected with
// the line number.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tdvp/dynamics.hpp"
#include "tdvp/trap.hpp"

namespace tdvp::scenario {

using cplx = std::complex<double>;

enum class Command { expect, husimi, evolve, equilibria, stability, quasienergy };

std::string_view to_string(Command c) noexcept;
Command parse_command(std::string_view text);

enum class Units { si, dimensionless };

struct RunSettings {
  // Initial or evaluation state.
  cplx z_a{0.0, 0.0};
  cplx z_r{0.0, 0.0};

  // husimi: grid over one mode's disk, the other frozen at its state above.
  trap::Mode grid_mode = trap::Mode::axial;
  double grid_re_min = 0.0, grid_re_max = 0.0;
  double grid_im_min = 0.0, grid_im_max = 0.0;
  int grid_n_re = 0, grid_n_im = 0;
  double time = 0.0;

  // evolve
  double t_start = 0.0;
  double t_end = 0.0;
  double tol = 1e-10;
  int samples = 200;  // evenly spaced output rows after t_start; 0 records every step

  // stability
  dynamics::ScanAxes scan_axes = dynamics::ScanAxes::mathieu;
  dynamics::Axis first{0.0, 0.0, 0};
  dynamics::Axis second{0.0, 0.0, 0};
  bool refine_edges = true;

  // quasienergy
  trap::Mode mode = trap::Mode::axial;
  int n_levels = 0;
};

struct ScenarioConfig {
  Command command = Command::expect;
  Units units = Units::si;
  trap::TrapConfig trap;
  RunSettings run;

  // Every effective setting as key/value text, in a fixed order. Feeding the
  // lines back through parse_config reproduces this config exactly.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

// Throws Error(config) with "<source>:<line>: ..." diagnostics.
ScenarioConfig parse_config(std::istream& in, Command command,
                            const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path, Command command);

// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  // Run-level results that are not per-row (diagnostics, brackets, ...).
  std::vector<std::pair<std::string, std::string>> meta;
};

struct RunOptions {
  bool verify = false;
  unsigned threads = 0;
};

struct Outcome {
  Table table;
  bool total_failure = false;
  std::vector<std::string> messages;  // human-readable notes for stderr
};

Outcome run(const ScenarioConfig& cfg, const RunOptions& opt);

std::string_view tool_version() noexcept;

void write_csv(std::ostream& out, const ScenarioConfig& cfg, const Table& table);
void write_json(std::ostream& out, const ScenarioConfig& cfg, const Table& table);

}  // namespace tdvp::scenario
