#pragma once

// Interaction energies of two perfectly conducting cylinders at zero
// temperature (hbar = c = 1). Every exact pipeline integrates ln M(beta) over
// the imaginary frequency beta = y a and reports the result both in absolute
// units and in reduced units L / (4 pi a^2).

#include <vector>

#include "casimir/detquad.hpp"
#include "casimir/kernel.hpp"

namespace casimir {

/// One rung of a truncation ladder.
struct LadderRung {
  int n_max = 0;
  int m_max = 0;  // widest m-window any kernel needed on this rung
  int panels = 0;
  double reduced = 0.0;
  double change = 0.0;  // reduced minus the previous rung (0 on the first)
};

struct EnergyResult {
  double value = 0.0;
  double reduced = 0.0;
  double tm = 0.0;
  double te = 0.0;
  double rel_error = 0.0;
  Truncation truncation_used;
  bool converged = false;
  /// Set when the inputs are outside the regime the approximation is meant for.
  bool warning = false;
  std::vector<LadderRung> ladder;
};

/// Ladder and safety controls shared by the exact pipelines.
struct EnergyOptions {
  /// Largest n_max the ladder may reach before giving up.
  int n_cap = 160;
  int n_step = 4;
  /// Allow gaps alpha - 1 - delta below min_gap.
  bool force_small_gap = false;
  double min_gap = 0.02;
  /// Evaluate only at the starting n_max; converged then reflects the
  /// quadrature alone. Used for convergence reports.
  bool fixed_truncation = false;
};

/// Full eccentric pipeline: ln det(1 - K_TM) + ln det(1 - K_TE) integrated
/// over beta, with N -> N + n_step until the change is below
/// max(q.rel_tol |E|, 1e-12) in reduced units.
EnergyResult casimir_exact(const Geometry& g, Truncation t, const QuadratureSpec& q,
                           const EnergyOptions& opt = {});

/// E(eps) - E(0) from the same kernels. The integrand is the pointwise
/// difference ln det(1 - K(eps)) - ln det(1 - K(0)), evaluated as a single
/// log-determinant of the rescaled excess K(eps) - K(0), so it keeps full
/// relative precision even when the difference is 1e-10 of the energy.
EnergyResult casimir_exact_delta(const Geometry& g, Truncation t, const QuadratureSpec& q,
                                 const EnergyOptions& opt = {});

/// Concentric cylinders: sum over n of ln(1 - d_n) for both polarizations.
/// Each ladder rung only integrates the new orders.
EnergyResult casimir_concentric(double alpha, double a, double len, int n_max,
                                const QuadratureSpec& q, const EnergyOptions& opt = {});

/// Contribution of one order |n| (both signs combined) to the concentric energy.
struct ModeEnergy {
  int n = 0;
  double tm = 0.0;
  double te = 0.0;
};
std::vector<ModeEnergy> concentric_mode_energies(double alpha, double a, double len, int n_max,
                                                 const QuadratureSpec& q);

/// Quasi-concentric Delta E = E(eps) - E(0) to order eps^2 from the
/// tridiagonal reduction of the kernel. warning is set for delta > 0.1.
EnergyResult delta_e_tridiagonal(const Geometry& g, int n_max, const QuadratureSpec& q,
                                 const EnergyOptions& opt = {});

/// Cylinder facing a plane; reduced units are L / (4 pi a^2) as well.
EnergyResult casimir_cylplane(const CylPlaneGeometry& g, Truncation t, const QuadratureSpec& q,
                              const EnergyOptions& opt = {});

/// Proximity-force values for the concentric energy, the eccentric energy
/// shift and the restoring force.
struct PfaForms {
  double e_cc_per_pol = 0.0;
  double e_cc_em = 0.0;
  double de_per_pol = 0.0;
  double de_em = 0.0;
  double force = 0.0;
};
PfaForms pfa_closed_forms(const Geometry& g);

/// C1 = int x K0/I0, C2 = int x^3 (K0/I0 + K1/I1), both over (0, inf).
struct AsymptoticConstants {
  double c1 = 0.0;
  double c2 = 0.0;

  /// Computed on first use by the quadrature engine and cached.
  static const AsymptoticConstants& get();
};

struct AsymptoteResult {
  double value = 0.0;       // E for b >> a
  double concentric = 0.0;  // the eps = 0 part
  double delta = 0.0;       // value - concentric
  bool warning = false;     // alpha < 10
};
AsymptoteResult large_alpha_asymptote(const Geometry& g, const AsymptoticConstants& c);

struct Electrostatics {
  double capacity = 0.0;
  double force = 0.0;
};
/// Capacity and attractive force at fixed voltage for eccentric cylinders.
Electrostatics electrostatics(const Geometry& g, double voltage, double eps0);

/// L / (4 pi a^2), the reduced energy unit.
double reduced_unit(double a, double len);

}  // namespace casimir
