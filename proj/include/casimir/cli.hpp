#pragma once

// Command-line front end: parameter sweeps over the energy pipelines with
// CSV output and an optional JSON run summary.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "casimir/energies.hpp"

namespace casimir::cli {

inline constexpr const char* kVersion = "1.0.0";

enum class Mode {
  Energy,
  SweepAlpha,
  SweepDelta,
  Concentric,
  CylPlane,
  Asymptotics,
  Pfa,
  Electrostatics,
  Modes,
  Convergence,
};

const char* to_string(Mode m);
/// Throws DomainError for an unknown name.
Mode parse_mode(const std::string& name);

/// Name of the variable a mode sweeps over ("alpha", "delta", "H/a", ...).
const char* grid_variable(Mode m);

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  bool log = false;

  void validate() const;
  /// count points from start to stop inclusive; a single point is start.
  std::vector<double> points() const;
};

struct SweepRequest {
  Mode mode = Mode::Energy;
  double a = 1.0;
  std::optional<double> b;
  std::optional<double> eps;
  std::optional<double> alpha;
  std::optional<double> delta;
  double length = 1.0;
  /// Cylinder-plane distance from the axis to the plane (defaults to 2a).
  std::optional<double> height;
  double voltage = 1.0;
  double eps0 = 8.8541878128e-12;
  std::optional<GridSpec> grid;
  int n_max = 8;
  double rel_tol = 1e-8;
  int workers = 1;
  bool force_small_gap = false;
  std::string out;
  std::string json;

  /// Base geometry from the (a, b, eps) / (alpha, delta) flags; throws
  /// DomainError if both forms are given and disagree.
  Geometry base_geometry() const;
};

struct SweepRow {
  /// Aligned with SweepTable::columns; NaN marks a value that does not apply.
  std::vector<double> values;
  bool converged = false;
  double rel_error = 0.0;
  double wall_time = 0.0;
  /// Diagnostic when the point failed numerically (row kept, flag cleared).
  std::string error;
};

struct SweepTable {
  std::vector<std::string> columns;  // numeric columns; converged and wall time follow
  std::vector<SweepRow> rows;
};

/// Column names of a mode, in output order (without the trailing
/// converged and wall_time_s columns).
std::vector<std::string> columns_for(Mode m);

/// Evaluates every grid point, up to request.workers points at a time; rows
/// come back in grid order. Throws DomainError for invalid input, before any
/// point is evaluated.
SweepTable run_sweep(const SweepRequest& request);

/// One row per ladder rung N (exact pipeline at fixed N), with the change
/// from the previous rung.
SweepTable convergence_report(const Geometry& g, const std::vector<int>& ladder,
                              const QuadratureSpec& q, const EnergyOptions& opt = {});

/// Header plus one line per row, 17 significant digits.
void write_csv(const SweepTable& table, std::ostream& out);

/// {version, request, rows_total, rows_converged, max_rel_error, wall_time_seconds}.
std::string json_summary(const SweepRequest& request, const SweepTable& table, double wall_time);

/// 0 if every row converged, 2 otherwise.
int exit_status(const SweepTable& table);

/// Full command line: parse, run, write outputs. Returns the process exit
/// status (1 on input errors, with a one-line diagnostic on err).
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace casimir::cli
