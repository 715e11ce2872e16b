#include <doctest.h>

#include <cmath>
#include <numbers>

#include "casimir/energies.hpp"
#include "casimir/errors.hpp"

using namespace casimir;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

QuadratureSpec tol(double rel_tol) {
  QuadratureSpec q;
  q.rel_tol = rel_tol;
  return q;
}

}  // namespace

TEST_SUITE("energies") {

TEST_CASE("eccentric pipeline at eps = 0 reproduces the concentric one") {
  const auto q = tol(1e-10);
  const auto cc = casimir_concentric(1.5, 1.0, 1.0, 8, q);
  const auto ex = casimir_exact(Geometry::from_ratios(1.5, 0.0), {8, 8}, q);
  REQUIRE(cc.converged);
  REQUIRE(ex.converged);
  CHECK(rel(ex.reduced, cc.reduced) < 1e-8);
  CHECK(rel(cc.reduced, -10.2925603001) < 1e-8);
  CHECK(cc.value == doctest::Approx(cc.reduced * reduced_unit(1, 1)).epsilon(1e-15));
  CHECK(cc.te == doctest::Approx(cc.value - cc.tm).epsilon(1e-15));
  CHECK(!cc.ladder.empty());
}

TEST_CASE("energy decreases away from the concentric position") {
  const auto q = tol(1e-8);
  const auto e0 = casimir_exact(Geometry::from_ratios(2.0, 0.0), {8, 8}, q);
  const auto e3 = casimir_exact(Geometry::from_ratios(2.0, 0.3), {8, 8}, q);
  CHECK(e3.value < e0.value);
  const auto d3 = casimir_exact_delta(Geometry::from_ratios(2.0, 0.3), {8, 8}, q);
  CHECK(rel(d3.value, e3.value - e0.value) < 1e-6);
}

TEST_CASE("quadratic eccentricity law and the tridiagonal limit") {
  const auto q = tol(1e-10);
  double de[3], tri[3];
  const double deltas[3] = {0.01, 0.02, 0.04};
  for (int i = 0; i < 3; ++i) {
    const Geometry g = Geometry::from_ratios(2.0, deltas[i]);
    de[i] = casimir_exact_delta(g, {8, 8}, q).value;
    tri[i] = delta_e_tridiagonal(g, 8, q).value;
  }
  CHECK(std::fabs(de[2] / de[1] / 4.0 - 1.0) < 0.01);
  CHECK(std::fabs(tri[2] / tri[1] - 4.0) < 1e-12);
  // relative difference between the pipelines vanishes like delta^2
  const double r1 = rel(tri[0], de[0]), r2 = rel(tri[1], de[1]), r3 = rel(tri[2], de[2]);
  const double slope = std::log(r3 / r1) / std::log(4.0);
  MESSAGE("tridiagonal vs exact: " << r1 << ", " << r2 << ", " << r3 << " (exponent " << slope << ")");
  CHECK(std::fabs(slope - 2.0) < 0.1);
}

TEST_CASE("tridiagonal agrees with the exact pipeline at delta = 0.05") {
  const auto q = tol(1e-9);
  const Geometry g = Geometry::from_ratios(2.0, 0.05);
  const auto exact = casimir_exact_delta(g, {8, 8}, q);
  const auto tri = delta_e_tridiagonal(g, 8, q);
  CHECK(exact.converged);
  CHECK(tri.converged);
  CHECK(rel(tri.value, exact.value) < 0.02);
  CHECK_FALSE(tri.warning);
  CHECK(delta_e_tridiagonal(Geometry::from_ratios(2.0, 0.2), 4, tol(1e-6)).warning);
}

TEST_CASE("tridiagonal ratio to the proximity force value near contact") {
  const Geometry g = Geometry::from_ratios(1.1, 0.01);
  const auto tri = delta_e_tridiagonal(g, 8, tol(1e-7));
  CHECK(tri.converged);
  const double ratio = tri.value / pfa_closed_forms(g).de_em;
  CHECK(std::fabs(ratio - 1.0) < 0.15);
  CHECK(ratio < delta_e_tridiagonal(Geometry::from_ratios(1.3, 0.01), 8, tol(1e-7)).value /
                    pfa_closed_forms(Geometry::from_ratios(1.3, 0.01)).de_em);
}

TEST_CASE("concentric near contact: both polarizations contribute equally") {
  const auto e = casimir_concentric(1.1, 1.0, 1.0, 8, tol(1e-7));
  CHECK(e.converged);
  const double ratio = e.value / pfa_closed_forms(Geometry::from_ratios(1.1, 0.0)).e_cc_em;
  CHECK((ratio > 0.85 && ratio < 1.15));
  CHECK(std::fabs(e.te / e.tm - 1.0) < 0.1);
}

TEST_CASE("large separation: the TM n = 0 order dominates") {
  const auto modes = concentric_mode_energies(50.0, 1.0, 1.0, 10, tol(1e-10));
  double total = 0.0;
  for (const auto& m : modes) total += m.tm + m.te;
  const double share = modes[0].tm / total;
  // The n = 0 TM share at alpha = 50 is 0.9839 (checked independently in
  // 30-digit arithmetic); the remainder is the TE n = 1 order.
  CHECK(share == doctest::Approx(0.98391).epsilon(1e-4));
  const auto cc = casimir_concentric(50.0, 1.0, 1.0, 10, tol(1e-10));
  CHECK(rel(total, cc.value) < 1e-8);
}

TEST_CASE("cylinder facing a plane") {
  const auto q = tol(1e-8);
  double prev = 0.0;
  for (double h : {1.5, 2.0, 3.0, 5.0}) {
    const auto e = casimir_cylplane({1.0, h, 1.0}, {8, 8}, q);
    CHECK(e.converged);
    CHECK(e.value < 0.0);
    if (prev != 0.0) CHECK(std::fabs(e.value) < std::fabs(prev));
    prev = e.value;
    if (h == 2.0) CHECK(rel(e.reduced, -0.2484573) < 1e-6);
    if (h == 5.0) CHECK(std::fabs(e.tm) > std::fabs(e.te));
  }
}

TEST_CASE("proximity force closed forms") {
  const auto p = pfa_closed_forms(Geometry::from_ratios(1.1, 0.0));
  CHECK(rel(p.e_cc_per_pol, -std::pow(kPi, 3) / 0.72) < 1e-12);
  CHECK(p.e_cc_per_pol == doctest::Approx(-43.064).epsilon(1e-4));
  const Geometry g{1.3, 1.9, 0.07, 2.5};
  const auto f = pfa_closed_forms(g);
  CHECK(rel(f.force * 60 * std::pow(g.a, 4) * std::pow(g.alpha() - 1, 5) / (std::pow(kPi, 3) * g.eps * g.len), 1.0) < 1e-14);
  CHECK(f.de_per_pol / f.de_em == 0.5);
  // zeta(4) = pi^4 / 90
  CHECK(rel(3.0 / 8.0 * (std::pow(kPi, 4) / 90.0) / kPi, std::pow(kPi, 3) / 240.0) < 1e-14);
}

TEST_CASE("large-alpha asymptote") {
  const auto& c = AsymptoticConstants::get();
  CHECK(std::fabs(2 * c.c1 / 1.26 - 1) < 0.01);
  CHECK(std::fabs(c.c2 / 3.33 - 1) < 0.01);
  CHECK(rel(2 * c.c1, 1.2627646085) < 1e-9);
  CHECK(rel(c.c2, 3.3348228056) < 1e-9);
  const Geometry g = Geometry::from_ratios(30.0, 0.0, 1.0, 2.0);
  const auto s = large_alpha_asymptote(g, c);
  CHECK(rel(s.value, -2 * c.c1 * g.len / (8 * kPi * g.b * g.b * std::log(30.0))) < 1e-14);
  CHECK(s.delta == 0.0);
  CHECK_FALSE(s.warning);
  CHECK(large_alpha_asymptote(Geometry::from_ratios(3.0, 0.5), c).warning);
}

TEST_CASE("electrostatics") {
  const double eps0 = 8.8541878128e-12;
  for (double alpha : {1.01, 2.0, 150.0}) {
    const Geometry g = Geometry::from_ratios(alpha, 0.0, 1.0, 3.0);
    const auto e = electrostatics(g, 2.0, eps0);
    CHECK(rel(e.capacity, 2 * kPi * eps0 * g.len / std::log(alpha)) < 4e-16);
    CHECK(e.force == 0.0);
  }
  const auto f1 = electrostatics(Geometry::from_ratios(2.0, 1e-4), 1.0, eps0).force;
  const auto f2 = electrostatics(Geometry::from_ratios(2.0, 2e-4), 1.0, eps0).force;
  CHECK(std::fabs(f2 / f1 - 2.0) < 2e-3);
  double prev_diff = 1e300, prev = 0.0;
  for (double alpha : {10.0, 50.0, 200.0}) {
    const Geometry g = Geometry::from_ratios(alpha, 0.3);
    const double scaled = electrostatics(g, 1.0, eps0).force * g.b * g.b * std::pow(std::log(alpha), 2) /
                          (g.len * g.eps * kPi * eps0);
    if (prev != 0.0) {
      CHECK(std::fabs(scaled - prev) < prev_diff);
      prev_diff = std::fabs(scaled - prev);
    }
    prev = scaled;
  }
  CHECK_THROWS_AS(electrostatics(Geometry{1, 2, 1, 1}, 1.0, eps0), DomainError);
}

TEST_CASE("global rescaling of lengths") {
  const auto q = tol(1e-9);
  const auto e1 = casimir_exact(Geometry{1.0, 1.7, 0.2, 1.0}, {8, 8}, q);
  const auto e3 = casimir_exact(Geometry{3.0, 5.1, 0.6, 3.0}, {8, 8}, q);
  CHECK(rel(e3.value, e1.value / 3.0) < 1e-12);
  CHECK(rel(e3.reduced, e1.reduced) < 1e-12);
  const auto c1 = casimir_cylplane({1.0, 2.0, 1.0}, {8, 8}, q);
  const auto c3 = casimir_cylplane({3.0, 6.0, 3.0}, {8, 8}, q);
  CHECK(rel(c3.value, c1.value / 3.0) < 1e-12);
}

TEST_CASE("gap floor and fixed truncation") {
  const Geometry tight = Geometry::from_ratios(1.05, 0.04);
  CHECK_THROWS_AS(casimir_exact(tight, {4, 4}, tol(1e-4)), DomainError);
  EnergyOptions opt;
  opt.fixed_truncation = true;
  const auto fixed = casimir_exact(Geometry::from_ratios(2.0, 0.1), {4, 4}, tol(1e-8), opt);
  CHECK(fixed.ladder.size() == 1);
  CHECK(fixed.truncation_used.n_max == 4);
  opt.force_small_gap = true;
  CHECK_NOTHROW(casimir_exact(tight, {4, 4}, tol(1e-4), opt));
}

TEST_CASE("ladder exhaustion is reported, not thrown") {
  EnergyOptions opt;
  opt.n_cap = 4;
  const auto e = casimir_concentric(1.05, 1.0, 1.0, 2, tol(1e-10), opt);
  CHECK_FALSE(e.converged);
  CHECK(e.truncation_used.n_max <= 4);
}

}  // TEST_SUITE
