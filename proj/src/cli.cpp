#include "casimir/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "casimir/errors.hpp"

namespace casimir::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ModeInfo {
  Mode mode;
  const char* name;
  const char* grid;
};

constexpr ModeInfo kModes[] = {
    {Mode::Energy, "energy", "none"},
    {Mode::SweepAlpha, "sweep-alpha", "alpha"},
    {Mode::SweepDelta, "sweep-delta", "delta"},
    {Mode::Concentric, "concentric", "alpha"},
    {Mode::CylPlane, "cylplane", "H/a"},
    {Mode::Asymptotics, "asymptotics", "alpha"},
    {Mode::Pfa, "pfa", "alpha"},
    {Mode::Electrostatics, "electrostatics", "delta"},
    {Mode::Modes, "modes", "lambda"},
    {Mode::Convergence, "convergence", "n_max"},
};

const ModeInfo& info(Mode m) {
  for (const auto& i : kModes) {
    if (i.mode == m) return i;
  }
  return kModes[0];
}

// What one grid point evaluates.
struct Point {
  Geometry geom;
  CylPlaneGeometry plane;
  double lambda = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

QuadratureSpec quadrature(const SweepRequest& r) {
  QuadratureSpec q;
  q.rel_tol = r.rel_tol;
  return q;
}

EnergyOptions options(const SweepRequest& r) {
  EnergyOptions o;
  o.force_small_gap = r.force_small_gap;
  return o;
}

void check_floor(const Geometry& g, const SweepRequest& r) {
  const EnergyOptions o = options(r);
  if (!o.force_small_gap && g.gap() < o.min_gap) {
    throw DomainError("geometry: gap alpha - 1 - delta = " + std::to_string(g.gap()) +
                      " is below " + std::to_string(o.min_gap) + " (use --force-small-gap)");
  }
}

double ratio_or_nan(double num, double den) { return den != 0.0 ? num / den : kNaN; }

std::vector<Point> make_points(const SweepRequest& r) {
  if (r.n_max < 1) throw DomainError("--nmax must be >= 1");
  if (!(r.rel_tol > 0.0)) throw DomainError("--rel-tol must be > 0");
  if (r.workers < 1) throw DomainError("--workers must be >= 1");
  const Geometry base = r.base_geometry();
  std::vector<double> grid;
  if (r.mode == Mode::Energy) {
    if (r.grid) throw DomainError("mode energy evaluates a single point; drop the --grid-* flags");
    grid = {0.0};
  } else if (r.grid) {
    r.grid->validate();
    grid = r.grid->points();
  } else if (r.mode == Mode::Modes) {
    throw DomainError("mode modes needs a lambda grid (--grid-start/--grid-stop/--grid-count)");
  } else if (r.mode == Mode::Convergence) {
    grid = {4, 8, 12, 16, 20, 24};
  } else {
    grid = {kNaN};  // the base value of the swept variable
  }

  std::vector<Point> pts;
  for (double v : grid) {
    Point p;
    p.geom = base;
    const bool base_value = std::isnan(v);
    switch (r.mode) {
      case Mode::SweepAlpha:
      case Mode::Concentric:
      case Mode::Asymptotics:
      case Mode::Pfa:
        if (!base_value) p.geom = Geometry::from_ratios(v, base.delta(), base.a, base.len);
        if (r.mode == Mode::Concentric) p.geom.eps = 0.0;
        break;
      case Mode::SweepDelta:
      case Mode::Electrostatics:
        if (!base_value) p.geom = Geometry::from_ratios(base.alpha(), v, base.a, base.len);
        break;
      case Mode::CylPlane: {
        const double h = base_value ? r.height.value_or(2.0 * base.a) : v * base.a;
        p.plane = {base.a, h, base.len};
        p.plane.validate();
        break;
      }
      case Mode::Modes:
        if (!(v > 0.0)) throw DomainError("modes: lambda grid values must be > 0");
        p.lambda = v;
        break;
      case Mode::Convergence:
        if (!(v >= 1.0) || v != std::round(v)) {
          throw DomainError("convergence: grid values are truncation orders N >= 1 (integers)");
        }
        p.lambda = v;
        break;
      case Mode::Energy:
        break;
    }
    if (r.mode != Mode::CylPlane) {
      p.geom.validate();
      const bool exact = r.mode != Mode::Electrostatics && r.mode != Mode::Modes &&
                         !(r.mode == Mode::Pfa && p.geom.eps == 0.0);
      if (exact) check_floor(p.geom, r);
    }
    if (r.mode == Mode::Electrostatics && !(r.voltage > 0.0 && r.eps0 > 0.0)) {
      throw DomainError("electrostatics: --voltage and --eps0 must be > 0");
    }
    pts.push_back(p);
  }
  return pts;
}

SweepRow eval_point(const SweepRequest& r, const Point& p) {
  const auto t0 = std::chrono::steady_clock::now();
  const QuadratureSpec q = quadrature(r);
  const EnergyOptions opt = options(r);
  const Truncation t{r.n_max, r.n_max};
  const Geometry& g = p.geom;
  SweepRow row;
  row.converged = true;
  auto& v = row.values;

  switch (r.mode) {
    case Mode::Energy:
    case Mode::SweepAlpha:
    case Mode::SweepDelta: {
      const auto e = casimir_exact(g, t, q, opt);
      const auto d = casimir_exact_delta(g, t, q, opt);
      const bool ecc = g.eps > 0.0;
      const double pfa = ecc ? pfa_closed_forms(g).de_em : 0.0;
      const double asym = ecc ? large_alpha_asymptote(g, AsymptoticConstants::get()).delta : 0.0;
      v = {g.alpha(), g.delta(), g.a, g.b, g.eps, g.len, e.reduced, e.value, e.tm, e.te,
           d.reduced, d.value, ecc ? ratio_or_nan(d.value, pfa) : kNaN,
           ecc ? ratio_or_nan(d.value, asym) : kNaN, std::max(e.rel_error, d.rel_error),
           static_cast<double>(e.truncation_used.n_max), static_cast<double>(e.truncation_used.m_max)};
      row.converged = e.converged && d.converged;
      row.rel_error = std::max(e.rel_error, d.rel_error);
      break;
    }
    case Mode::Concentric: {
      const auto e = casimir_concentric(g.alpha(), g.a, g.len, r.n_max, q, opt);
      const double pfa = pfa_closed_forms(g).e_cc_em;
      const double asym = large_alpha_asymptote(g, AsymptoticConstants::get()).concentric;
      v = {g.alpha(), g.a, g.b, g.len, e.reduced, e.value, e.tm, e.te, e.value / pfa, e.value / asym,
           e.rel_error, static_cast<double>(e.truncation_used.n_max)};
      row.converged = e.converged;
      row.rel_error = e.rel_error;
      break;
    }
    case Mode::CylPlane: {
      const auto e = casimir_cylplane(p.plane, t, q, opt);
      v = {p.plane.height / p.plane.a, p.plane.a, p.plane.height, p.plane.len, e.reduced, e.value,
           e.tm, e.te, e.rel_error, static_cast<double>(e.truncation_used.n_max)};
      row.converged = e.converged;
      row.rel_error = e.rel_error;
      break;
    }
    case Mode::Asymptotics: {
      const auto d = casimir_exact_delta(g, t, q, opt);
      const auto s = large_alpha_asymptote(g, AsymptoticConstants::get());
      v = {g.alpha(), g.delta(), g.a, g.b, g.eps, g.len, d.reduced, d.value, s.delta,
           g.eps > 0.0 ? ratio_or_nan(d.value, s.delta) : kNaN, s.value, d.rel_error,
           static_cast<double>(d.truncation_used.n_max)};
      row.converged = d.converged;
      row.rel_error = d.rel_error;
      break;
    }
    case Mode::Pfa: {
      const auto f = pfa_closed_forms(g);
      double de = kNaN, ratio = kNaN, err = 0.0, n_used = kNaN;
      if (g.eps > 0.0) {
        const auto d = delta_e_tridiagonal(g, r.n_max, q, opt);
        de = d.value;
        ratio = d.value / f.de_em;
        err = d.rel_error;
        n_used = d.truncation_used.n_max;
        row.converged = d.converged;
      }
      v = {g.alpha(), g.delta(), g.a, g.b, g.eps, g.len, f.e_cc_per_pol, f.e_cc_em, f.de_per_pol,
           f.de_em, f.force, de, ratio, err, n_used};
      row.rel_error = err;
      break;
    }
    case Mode::Electrostatics: {
      const auto e = electrostatics(g, r.voltage, r.eps0);
      v = {g.alpha(), g.delta(), g.a, g.b, g.eps, g.len, r.voltage, r.eps0, e.capacity, e.force};
      break;
    }
    case Mode::Modes: {
      v = {p.lambda, g.a, g.b, g.eps, q_matrix_det(p.lambda, g, t, Polarization::TM),
           q_matrix_det(p.lambda, g, t, Polarization::TE), static_cast<double>(r.n_max)};
      break;
    }
    case Mode::Convergence:
      break;  // handled by convergence_report
  }
  row.wall_time = seconds_since(t0);
  return row;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

const char* to_string(Mode m) { return info(m).name; }

const char* grid_variable(Mode m) { return info(m).grid; }

Mode parse_mode(const std::string& name) {
  for (const auto& i : kModes) {
    if (name == i.name) return i.mode;
  }
  throw DomainError("unknown mode '" + name + "'");
}

void GridSpec::validate() const {
  if (count < 1) throw DomainError("grid: --grid-count must be >= 1");
  if (!std::isfinite(start) || !std::isfinite(stop)) throw DomainError("grid: bounds must be finite");
  if (log && !(start > 0.0 && stop > 0.0)) throw DomainError("grid: log spacing needs positive bounds");
}

std::vector<double> GridSpec::points() const {
  validate();
  std::vector<double> out;
  if (count == 1) return {start};
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    if (i == count - 1) {
      out.push_back(stop);
    } else if (log) {
      out.push_back(start * std::pow(stop / start, f));
    } else {
      out.push_back(start + (stop - start) * f);
    }
  }
  return out;
}

Geometry SweepRequest::base_geometry() const {
  if (!(a > 0.0)) throw DomainError("geometry: --a must be > 0");
  auto agree = [](double x, double y) { return std::fabs(x - y) <= 1e-12 * std::max(std::fabs(x), std::fabs(y)); };
  double bb = alpha.value_or(2.0) * a;
  if (b) {
    if (alpha && !agree(*b, *alpha * a)) throw DomainError("geometry: --b and --alpha disagree (b != alpha a)");
    bb = *b;
  }
  double ee = delta.value_or(0.0) * a;
  if (eps) {
    if (delta && !agree(*eps, *delta * a)) throw DomainError("geometry: --eps and --delta disagree (eps != delta a)");
    ee = *eps;
  }
  return {a, bb, ee, length};
}

std::vector<std::string> columns_for(Mode m) {
  switch (m) {
    case Mode::Energy:
    case Mode::SweepAlpha:
    case Mode::SweepDelta:
      return {"alpha", "delta", "a", "b", "eps", "length", "reduced", "energy", "tm", "te",
              "delta_e_reduced", "delta_e", "ratio_delta_pfa", "ratio_delta_asymptote", "rel_error",
              "n_max", "m_max"};
    case Mode::Concentric:
      return {"alpha", "a", "b", "length", "reduced", "energy", "tm", "te", "ratio_pfa",
              "ratio_asymptote", "rel_error", "n_max"};
    case Mode::CylPlane:
      return {"height_over_a", "a", "height", "length", "reduced", "energy", "tm", "te",
              "rel_error", "n_max"};
    case Mode::Asymptotics:
      return {"alpha", "delta", "a", "b", "eps", "length", "delta_e_reduced", "delta_e",
              "delta_e_asymptote", "ratio_asymptote", "energy_asymptote", "rel_error", "n_max"};
    case Mode::Pfa:
      return {"alpha", "delta", "a", "b", "eps", "length", "e_cc_per_pol", "e_cc_em", "de_per_pol",
              "de_em", "force_pfa", "delta_e_tridiagonal", "ratio_tridiagonal_pfa", "rel_error",
              "n_max"};
    case Mode::Electrostatics:
      return {"alpha", "delta", "a", "b", "eps", "length", "voltage", "eps0", "capacity", "force"};
    case Mode::Modes:
      return {"lambda", "a", "b", "eps", "q_det_tm", "q_det_te", "n_max"};
    case Mode::Convergence:
      return {"n_max", "m_max", "panels", "alpha", "delta", "reduced", "energy", "change"};
  }
  return {};
}

SweepTable convergence_report(const Geometry& g, const std::vector<int>& ladder,
                              const QuadratureSpec& q, const EnergyOptions& opt) {
  SweepTable table;
  table.columns = columns_for(Mode::Convergence);
  EnergyOptions fixed = opt;
  fixed.fixed_truncation = true;
  double previous = kNaN;
  for (int n : ladder) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto e = casimir_exact(g, {n, n}, q, fixed);
    const auto& rung = e.ladder.front();
    SweepRow row;
    row.values = {static_cast<double>(n), static_cast<double>(e.truncation_used.m_max),
                  static_cast<double>(rung.panels), g.alpha(), g.delta(), e.reduced, e.value,
                  std::isnan(previous) ? kNaN : e.reduced - previous};
    row.converged = e.converged;
    row.rel_error = e.rel_error;
    row.wall_time = seconds_since(t0);
    previous = e.reduced;
    table.rows.push_back(std::move(row));
  }
  return table;
}

SweepTable run_sweep(const SweepRequest& request) {
  const auto points = make_points(request);
  if (request.mode == Mode::Convergence) {
    std::vector<int> ladder;
    for (const auto& p : points) ladder.push_back(static_cast<int>(p.lambda));
    return convergence_report(points.front().geom, ladder, quadrature(request), options(request));
  }

  SweepTable table;
  table.columns = columns_for(request.mode);
  table.rows.resize(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        table.rows[i] = eval_point(request, points[i]);
      } catch (const std::exception& e) {
        SweepRow row;
        row.values.assign(table.columns.size(), kNaN);
        row.converged = false;
        row.rel_error = kNaN;
        row.error = e.what();
        table.rows[i] = std::move(row);
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(request.workers), points.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return table;
}

void write_csv(const SweepTable& table, std::ostream& out) {
  for (const auto& c : table.columns) out << c << ',';
  out << "converged,wall_time_s\n";
  for (const auto& row : table.rows) {
    for (double v : row.values) out << format_number(v) << ',';
    out << (row.converged ? 1 : 0) << ',' << format_number(row.wall_time) << '\n';
  }
}

std::string json_summary(const SweepRequest& r, const SweepTable& table, double wall_time) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json req = {
      {"mode", to_string(r.mode)},
      {"a", r.a},
      {"b", opt(r.b)},
      {"eps", opt(r.eps)},
      {"alpha", opt(r.alpha)},
      {"delta", opt(r.delta)},
      {"length", r.length},
      {"height", opt(r.height)},
      {"voltage", r.voltage},
      {"eps0", r.eps0},
      {"n_max", r.n_max},
      {"rel_tol", r.rel_tol},
      {"workers", r.workers},
      {"force_small_gap", r.force_small_gap},
      {"grid_variable", grid_variable(r.mode)},
  };
  req["grid"] = r.grid ? json{{"start", r.grid->start}, {"stop", r.grid->stop}, {"count", r.grid->count},
                              {"log", r.grid->log}}
                       : json(nullptr);
  int converged = 0;
  double max_err = 0.0;
  for (const auto& row : table.rows) {
    converged += row.converged ? 1 : 0;
    if (std::isfinite(row.rel_error)) max_err = std::max(max_err, row.rel_error);
  }
  const json summary = {
      {"version", kVersion},
      {"request", req},
      {"rows_total", table.rows.size()},
      {"rows_converged", converged},
      {"max_rel_error", max_err},
      {"wall_time_seconds", wall_time},
  };
  return summary.dump(2);
}

int exit_status(const SweepTable& table) {
  for (const auto& row : table.rows) {
    if (!row.converged) return 2;
  }
  return 0;
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Casimir energies of eccentric cylinders: sweeps, limits and convergence reports"};
  app.set_version_flag("--version", kVersion);
  SweepRequest r;
  std::string mode = "energy";
  double b = 0, eps = 0, alpha = 0, delta = 0, height = 0;
  GridSpec grid;
  app.add_option("--mode", mode,
                 "energy | sweep-alpha | sweep-delta | concentric | cylplane | asymptotics | pfa | "
                 "electrostatics | modes | convergence")
      ->capture_default_str();
  app.add_option("--a", r.a, "inner radius")->capture_default_str();
  auto* ob = app.add_option("--b", b, "outer radius");
  auto* oe = app.add_option("--eps", eps, "eccentricity (axis offset)");
  auto* oa = app.add_option("--alpha", alpha, "b / a (default 2)");
  auto* od = app.add_option("--delta", delta, "eps / a (default 0)");
  app.add_option("--length", r.length, "cylinder length L")->capture_default_str();
  auto* oh = app.add_option("--height", height, "cylplane: axis-to-plane distance H (default 2a)");
  app.add_option("--voltage", r.voltage, "electrostatics: potential difference")->capture_default_str();
  app.add_option("--eps0", r.eps0, "electrostatics: permittivity")->capture_default_str();
  auto* gs = app.add_option("--grid-start", grid.start, "first grid value");
  auto* gt = app.add_option("--grid-stop", grid.stop, "last grid value (default: start)");
  auto* gc = app.add_option("--grid-count", grid.count, "number of grid points");
  app.add_flag("--grid-log", grid.log, "logarithmic grid spacing");
  app.add_option("--nmax", r.n_max, "starting truncation N")->capture_default_str();
  app.add_option("--rel-tol", r.rel_tol, "relative tolerance")->capture_default_str();
  app.add_option("--workers", r.workers, "grid points evaluated concurrently")->capture_default_str();
  app.add_option("--out", r.out, "CSV output path (default: standard output)");
  app.add_option("--json", r.json, "JSON summary path");
  app.add_flag("--force-small-gap", r.force_small_gap, "allow alpha - 1 - delta < 0.02");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  const auto t0 = std::chrono::steady_clock::now();
  SweepTable table;
  try {
    r.mode = parse_mode(mode);
    if (*ob) r.b = b;
    if (*oe) r.eps = eps;
    if (*oa) r.alpha = alpha;
    if (*od) r.delta = delta;
    if (*oh) r.height = height;
    if (*gs || *gt || *gc) {
      if (!*gs) throw DomainError("grid: --grid-start is required with other --grid-* flags");
      if (!*gt) grid.stop = grid.start;
      r.grid = grid;
    }
    table = run_sweep(r);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (!table.rows[i].error.empty()) err << "row " << i << ": " << table.rows[i].error << '\n';
  }
  if (r.out.empty()) {
    write_csv(table, out);
  } else {
    std::ofstream f(r.out);
    if (!f) {
      err << "error: cannot open " << r.out << " for writing\n";
      return 1;
    }
    write_csv(table, f);
  }
  if (!r.json.empty()) {
    std::ofstream f(r.json);
    if (!f) {
      err << "error: cannot open " << r.json << " for writing\n";
      return 1;
    }
    f << json_summary(r, table, seconds_since(t0)) << '\n';
  }
  return exit_status(table);
}

}  // namespace casimir::cli
