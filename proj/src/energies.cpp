#include "casimir/energies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "casimir/errors.hpp"

namespace casimir {

namespace {

constexpr double kPi = std::numbers::pi;

// Reduced TM/TE values of one ladder rung (or of one block of new orders).
struct RungValue {
  double tm = 0.0;
  double te = 0.0;
  double abs_error = 0.0;
  int panels = 0;
  int m_max = 0;
  bool quad_converged = true;
};

// lo..hi are the orders to evaluate. Full ladders always get lo = 0;
// incremental ladders get only the orders added since the last rung.
using RungFn = std::function<RungValue(int lo, int hi)>;

EnergyResult run_ladder(int n_start, const EnergyOptions& opt, double rel_tol, double floor,
                        bool incremental, double unit, const RungFn& rung) {
  if (opt.n_step < 1) throw DomainError("energy ladder: n_step must be >= 1");
  EnergyResult r;
  double tm = 0.0, te = 0.0, quad_error = 0.0, last_change = 0.0;
  bool quad_ok = true, ladder_ok = false;
  int n = n_start, m_used = 0;

  auto absorb = [&](const RungValue& v) {
    if (incremental) {
      tm += v.tm;
      te += v.te;
      quad_error += v.abs_error;
      quad_ok = quad_ok && v.quad_converged;
    } else {
      tm = v.tm;
      te = v.te;
      quad_error = v.abs_error;
      quad_ok = v.quad_converged;
    }
    m_used = std::max(m_used, v.m_max);
  };

  RungValue first = rung(0, n);
  absorb(first);
  r.ladder.push_back({n, first.m_max, first.panels, tm + te, 0.0});

  if (opt.fixed_truncation) ladder_ok = true;
  while (!opt.fixed_truncation && n + opt.n_step <= opt.n_cap) {
    const int next = n + opt.n_step;
    const double before = tm + te;
    const RungValue v = rung(incremental ? n + 1 : 0, next);
    absorb(v);
    n = next;
    last_change = (tm + te) - before;
    r.ladder.push_back({n, v.m_max, v.panels, tm + te, last_change});
    if (std::fabs(last_change) < std::max(rel_tol * std::fabs(tm + te), floor)) {
      ladder_ok = true;
      break;
    }
  }

  r.reduced = tm + te;
  r.value = r.reduced * unit;
  r.tm = tm * unit;
  r.te = r.value - r.tm;
  r.rel_error = r.reduced != 0.0 ? (std::fabs(last_change) + quad_error) / std::fabs(r.reduced) : 0.0;
  r.truncation_used = {n, std::max(n, m_used)};
  r.converged = ladder_ok && quad_ok;
  return r;
}

void check_gap(const Geometry& g, const EnergyOptions& opt) {
  g.validate();
  if (!opt.force_small_gap && g.gap() < opt.min_gap) {
    throw DomainError("geometry: gap alpha - 1 - delta = " + std::to_string(g.gap()) +
                      " is below " + std::to_string(opt.min_gap) +
                      " (matrix sizes explode; force_small_gap overrides)");
  }
}

void check_inputs(Truncation t, const QuadratureSpec& q) {
  t.validate();
  q.validate();
}

void atomic_max(std::atomic<int>& a, int v) {
  int cur = a.load(std::memory_order_relaxed);
  while (v > cur && !a.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
  }
}

RungValue integrate_rung(const ComponentIntegrand& f, double beta_scale, const QuadratureSpec& q,
                         const std::atomic<int>& m_seen) {
  const auto parts = energy_integral_multi(f, 2, beta_scale, q);
  RungValue v;
  v.tm = parts[0].value;
  v.te = parts[1].value;
  v.abs_error = parts[0].abs_error_estimate + parts[1].abs_error_estimate;
  v.panels = parts[0].panels_used;
  v.quad_converged = parts[0].converged && parts[1].converged;
  v.m_max = m_seen.load();
  return v;
}

double concentric_block(double alpha, double beta, int lo, int hi, Polarization pol) {
  const auto d = build_kernel_concentric(alpha, beta, hi, pol);
  double s = 0.0;
  for (int n = lo; n <= hi; ++n) s += (n == 0 ? 1.0 : 2.0) * std::log1p(-d[n]);
  return s;
}

// ln det(1 - K) - ln det(1 - D) = ln det(1 - B) with
// B = (1 - D)^{-1/2} (K - D) (1 - D)^{-1/2}; excess holds K - D.
double excess_logdet(const KernelMatrix& excess, const std::vector<double>& d) {
  const int n_max = excess.n_max();
  const int dim = excess.dim();
  std::vector<double> inv_root(static_cast<std::size_t>(dim));
  for (int n = -n_max; n <= n_max; ++n) inv_root[n + n_max] = 1.0 / std::sqrt(1.0 - d[std::abs(n)]);
  std::vector<double> b(excess.data().begin(), excess.data().end());
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) b[static_cast<std::size_t>(i) * dim + j] *= inv_root[i] * inv_root[j];
  }
  return logdet_one_minus(b, dim);
}

}  // namespace

double reduced_unit(double a, double len) { return len / (4.0 * kPi * a * a); }

EnergyResult casimir_exact(const Geometry& g, Truncation t, const QuadratureSpec& q,
                           const EnergyOptions& opt) {
  check_gap(g, opt);
  check_inputs(t, q);
  const double scale = 0.5 / g.gap();
  const RungFn rung = [&](int, int n) {
    std::atomic<int> m_seen{0};
    const Truncation tt{n, std::max(t.m_max, n)};
    const ComponentIntegrand f = [&](double beta, std::span<double> out) {
      const auto ktm = build_kernel_eccentric(g, beta, tt, Polarization::TM);
      const auto kte = build_kernel_eccentric(g, beta, tt, Polarization::TE);
      atomic_max(m_seen, std::max(ktm.m_max_used(), kte.m_max_used()));
      out[0] = logdet_one_minus(ktm);
      out[1] = logdet_one_minus(kte);
    };
    return integrate_rung(f, scale, q, m_seen);
  };
  return run_ladder(t.n_max, opt, q.rel_tol, 1e-12, false, reduced_unit(g.a, g.len), rung);
}

EnergyResult casimir_exact_delta(const Geometry& g, Truncation t, const QuadratureSpec& q,
                                 const EnergyOptions& opt) {
  check_gap(g, opt);
  check_inputs(t, q);
  if (g.eps == 0.0) {
    EnergyResult r;
    r.truncation_used = t;
    r.converged = true;
    return r;
  }
  const double scale = 0.5 / g.gap();
  const RungFn rung = [&](int, int n) {
    std::atomic<int> m_seen{0};
    const Truncation tt{n, std::max(t.m_max, n)};
    const ComponentIntegrand f = [&](double beta, std::span<double> out) {
      int i = 0;
      for (Polarization pol : {Polarization::TM, Polarization::TE}) {
        const auto k = build_kernel_eccentric_excess(g, beta, tt, pol);
        atomic_max(m_seen, k.m_max_used());
        out[i++] = excess_logdet(k, build_kernel_concentric(g.alpha(), beta, n, pol));
      }
    };
    return integrate_rung(f, scale, q, m_seen);
  };
  // The difference can be many decades below 1e-12; the stop is purely relative.
  return run_ladder(t.n_max, opt, q.rel_tol, std::numeric_limits<double>::min(), false,
                    reduced_unit(g.a, g.len), rung);
}

EnergyResult casimir_concentric(double alpha, double a, double len, int n_max,
                                const QuadratureSpec& q, const EnergyOptions& opt) {
  const Geometry g{a, alpha * a, 0.0, len};
  check_gap(g, opt);
  q.validate();
  if (n_max < 0) throw DomainError("concentric energy: n_max must be >= 0");
  const double scale = 0.5 / g.gap();
  const RungFn rung = [&](int lo, int hi) {
    const std::atomic<int> m_seen{0};
    const ComponentIntegrand f = [&](double beta, std::span<double> out) {
      out[0] = concentric_block(alpha, beta, lo, hi, Polarization::TM);
      out[1] = concentric_block(alpha, beta, lo, hi, Polarization::TE);
    };
    return integrate_rung(f, scale, q, m_seen);
  };
  return run_ladder(n_max, opt, q.rel_tol, 1e-12, true, reduced_unit(a, len), rung);
}

std::vector<ModeEnergy> concentric_mode_energies(double alpha, double a, double len, int n_max,
                                                 const QuadratureSpec& q) {
  const Geometry g{a, alpha * a, 0.0, len};
  g.validate();
  if (n_max < 0) throw DomainError("concentric energy: n_max must be >= 0");
  const int count = n_max + 1;
  const ComponentIntegrand f = [&](double beta, std::span<double> out) {
    const auto tm = build_kernel_concentric(alpha, beta, n_max, Polarization::TM);
    const auto te = build_kernel_concentric(alpha, beta, n_max, Polarization::TE);
    for (int n = 0; n <= n_max; ++n) {
      const double w = n == 0 ? 1.0 : 2.0;
      out[2 * n] = w * std::log1p(-tm[n]);
      out[2 * n + 1] = w * std::log1p(-te[n]);
    }
  };
  const auto parts = energy_integral_multi(f, 2 * count, 0.5 / g.gap(), q);
  const double unit = reduced_unit(a, len);
  std::vector<ModeEnergy> out(static_cast<std::size_t>(count));
  for (int n = 0; n <= n_max; ++n) {
    out[n] = {n, parts[2 * n].value * unit, parts[2 * n + 1].value * unit};
  }
  return out;
}

EnergyResult delta_e_tridiagonal(const Geometry& g, int n_max, const QuadratureSpec& q,
                                 const EnergyOptions& opt) {
  check_gap(g, opt);
  q.validate();
  if (n_max < 1) throw DomainError("tridiagonal energy: n_max must be >= 1");
  const double delta = g.delta();
  // The integrand depends on eps only through the delta^2 prefactor, so the
  // frequency scale must not: Delta E(2 eps) / Delta E(eps) is then exactly 4.
  const double scale = 0.5 / (g.alpha() - 1.0);

  // beta^2 times the order-eps^2 part of ln M per unit delta^2, for the
  // diagonal orders lo..hi and the couplings (n, n+1), n = max(lo-1, 0)..hi-1.
  auto block = [&](double beta, int lo, int hi, Polarization pol) {
    const auto t = tridiag_series(g, beta, hi, pol);
    double s = 0.0;
    for (int n = lo; n <= hi; ++n) s += (n == 0 ? 1.0 : 2.0) * t[n].dqc / (1.0 - t[n].dcc);
    for (int n = std::max(lo - 1, 0); n < hi; ++n) {
      s += 2.0 * t[n].nqc / ((1.0 - t[n].dcc) * (1.0 - t[n + 1].dcc));
    }
    return -delta * delta * beta * beta * s;
  };

  const RungFn rung = [&](int lo, int hi) {
    const std::atomic<int> m_seen{0};
    const ComponentIntegrand f = [&](double beta, std::span<double> out) {
      out[0] = block(beta, lo, hi, Polarization::TM);
      out[1] = block(beta, lo, hi, Polarization::TE);
    };
    return integrate_rung(f, scale, q, m_seen);
  };
  auto r = run_ladder(n_max, opt, q.rel_tol, std::numeric_limits<double>::min(), true,
                      reduced_unit(g.a, g.len), rung);
  r.warning = delta > 0.1;
  return r;
}

EnergyResult casimir_cylplane(const CylPlaneGeometry& g, Truncation t, const QuadratureSpec& q,
                              const EnergyOptions& opt) {
  g.validate();
  check_inputs(t, q);
  const double scale = 0.5 / (g.height / g.a - 1.0);
  const RungFn rung = [&](int, int n) {
    const std::atomic<int> m_seen{0};
    const Truncation tt{n, std::max(t.m_max, n)};
    const ComponentIntegrand f = [&](double beta, std::span<double> out) {
      out[0] = logdet_one_minus(build_kernel_cylplane(g, beta, tt, Polarization::TM));
      out[1] = logdet_one_minus(build_kernel_cylplane(g, beta, tt, Polarization::TE));
    };
    return integrate_rung(f, scale, q, m_seen);
  };
  return run_ladder(t.n_max, opt, q.rel_tol, 1e-12, false, reduced_unit(g.a, g.len), rung);
}

PfaForms pfa_closed_forms(const Geometry& g) {
  if (!(g.a > 0.0) || !(g.b > g.a)) throw DomainError("pfa: need 0 < a < b");
  const double pi3 = kPi * kPi * kPi;
  const double s = g.alpha() - 1.0;
  const double s3 = s * s * s, s5 = s3 * s * s;
  const double a2 = g.a * g.a, a4 = a2 * a2;
  PfaForms p;
  p.e_cc_per_pol = -pi3 * g.len / (720.0 * a2 * s3);
  p.e_cc_em = 2.0 * p.e_cc_per_pol;
  p.de_per_pol = -pi3 * g.len * g.eps * g.eps / (240.0 * a4 * s5);
  p.de_em = 2.0 * p.de_per_pol;
  p.force = pi3 * g.eps * g.len / (60.0 * a4 * s5);
  return p;
}

const AsymptoticConstants& AsymptoticConstants::get() {
  static const AsymptoticConstants c = [] {
    QuadratureSpec q;
    q.rel_tol = 1e-12;
    // Both integrands decay like e^{-2x}.
    const auto k0_over_i0 = [](double x) {
      const auto arr = detail::log_bessel_arrays(x, 1, false);
      return std::exp(arr.log_k[0] - arr.log_i[0]);
    };
    const auto c2_part = [](double x) {
      const auto arr = detail::log_bessel_arrays(x, 1, false);
      return x * x * (std::exp(arr.log_k[0] - arr.log_i[0]) + std::exp(arr.log_k[1] - arr.log_i[1]));
    };
    AsymptoticConstants out;
    out.c1 = energy_integral(k0_over_i0, 0.5, q).value;
    out.c2 = energy_integral(c2_part, 0.5, q).value;
    return out;
  }();
  return c;
}

AsymptoteResult large_alpha_asymptote(const Geometry& g, const AsymptoticConstants& c) {
  g.validate();
  const double b2 = g.b * g.b;
  const double pref = -g.len / (8.0 * kPi * b2 * std::log(g.alpha()));
  AsymptoteResult r;
  r.concentric = pref * 2.0 * c.c1;
  r.delta = pref * c.c2 * g.eps * g.eps / b2;
  r.value = pref * (2.0 * c.c1 + c.c2 * g.eps * g.eps / b2);
  r.warning = g.alpha() < 10.0;
  return r;
}

Electrostatics electrostatics(const Geometry& g, double voltage, double eps0) {
  if (!(g.a > 0.0) || !(g.b > g.a) || !(g.eps >= 0.0) || !(g.len > 0.0)) {
    throw DomainError("electrostatics: need 0 < a < b, eps >= 0, L > 0");
  }
  if (!(voltage > 0.0) || !(eps0 > 0.0)) {
    throw DomainError("electrostatics: voltage and permittivity must be > 0");
  }
  const double ab2 = 2.0 * g.a * g.b;
  // Y - 1 and Y + 1 in factored form so touching shells are detected exactly.
  const double y_minus = ((g.b - g.a) * (g.b - g.a) - g.eps * g.eps) / ab2;
  const double y_plus = ((g.a + g.b) * (g.a + g.b) - g.eps * g.eps) / ab2;
  if (!(y_minus > 0.0)) {
    throw DomainError("electrostatics: Y <= 1 (cylinders touch or overlap)");
  }
  const double root = std::sqrt(y_minus * y_plus);  // sqrt(Y^2 - 1)
  const double acosh_y = std::log1p(y_minus + root);
  Electrostatics e;
  e.capacity = 2.0 * kPi * eps0 * g.len / acosh_y;
  e.force = (g.eps / (g.a * g.b)) * kPi * eps0 * voltage * voltage * g.len /
            (root * acosh_y * acosh_y);
  return e;
}

}  // namespace casimir
