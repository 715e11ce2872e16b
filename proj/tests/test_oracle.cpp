#include <doctest.h>

#include <cmath>

#include "casimir/errors.hpp"
#include "casimir/oracle.hpp"

using namespace casimir;
using oracle::HighPrecReal;

namespace {

HighPrecReal rel(const HighPrecReal& a, const HighPrecReal& b) { return abs(a - b) / abs(b); }

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("I series: values at zero and self-consistency") {
  CHECK(oracle::series_bessel_i(0, HighPrecReal(0), 5) == 1);
  CHECK(oracle::series_bessel_i(1, HighPrecReal(0), 5) == 0);
  const HighPrecReal x(2);
  const auto a = oracle::series_bessel_i(0, x, 40);
  const auto b = oracle::series_bessel_i(0, x, 50);
  CHECK(rel(a, b) < HighPrecReal("1e-30"));
  CHECK(std::fabs(a.convert_to<double>() - 2.2795853023360673) < 1e-15);
  CHECK_THROWS_AS(oracle::series_bessel_i(0, HighPrecReal(30), 10), PrecisionError);
}

TEST_CASE("K: Wronskian with the I series, small-x limit, two regimes") {
  const HighPrecReal x(1);
  for (int n = 0; n < 6; ++n) {
    const auto w = oracle::series_bessel_i(n, x) * oracle::series_bessel_k(n + 1, x) +
                   oracle::series_bessel_i(n + 1, x) * oracle::series_bessel_k(n, x);
    CHECK(rel(w, 1 / x) < HighPrecReal("1e-25"));
  }
  const HighPrecReal small("1e-4");
  CHECK(rel(oracle::series_bessel_k(1, small), 1 / small) < HighPrecReal("1e-6"));
  const auto k02 = oracle::series_bessel_k(0, HighPrecReal(2));
  CHECK(rel(k02, oracle::integral_bessel_k(0, HighPrecReal(2))) < HighPrecReal("1e-25"));
  CHECK(std::fabs(k02.convert_to<double>() - 0.11389387274953344) < 1e-16);
  // either side of the series/asymptotic seam
  for (const char* s : {"59.5", "60.5"}) {
    const HighPrecReal y(s);
    for (int n : {0, 1, 3}) {
      CHECK(rel(oracle::series_bessel_k(n, y), oracle::integral_bessel_k(n, y)) < HighPrecReal("1e-25"));
    }
  }
}

TEST_CASE("ordinary series: Wronskian") {
  const HighPrecReal x("1.7");
  const auto w = oracle::series_bessel_j(1, x) * oracle::series_bessel_y(0, x) -
                 oracle::series_bessel_j(0, x) * oracle::series_bessel_y(1, x);
  CHECK(rel(w, 2 / (boost::math::constants::pi<HighPrecReal>() * x)) < HighPrecReal("1e-25"));
}

TEST_CASE("permutation determinant") {
  CHECK(oracle::naive_logdet(std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 1}, 3) == 0.0);
  CHECK(oracle::naive_logdet(std::vector<double>{2, 1, 1, 2}, 2) == doctest::Approx(std::log(3.0)));
  CHECK_THROWS_AS(oracle::naive_logdet(std::vector<double>{0, 1, 1, 0}, 2), DomainError);
  CHECK_THROWS_AS(oracle::naive_logdet(std::vector<double>(81, 0.0), 9), DomainError);
}

TEST_CASE("concentric cross-product root") {
  const double r = oracle::concentric_cross_root(1.0, 2.0, 0, Polarization::TM, 3.0, 3.16);
  CHECK(std::fabs(r - 3.123030919595692) < 1e-13);
  CHECK(std::fabs(r / std::numbers::pi - 1.0) < 0.05);
}

TEST_CASE("identity checks") {
  const auto report = oracle::identity_checks();
  REQUIRE(report.checks.size() == 4);
  for (const auto& c : report.checks) MESSAGE(c.name << ": " << (c.passed ? "pass" : "fail") << " " << c.detail);
  CHECK(report.checks[0].passed);  // addition theorem
  CHECK(report.checks[1].passed);  // product rule
  for (double d : report.checks[0].deviations) CHECK(d < 1e-10);
  // The uniform-expansion ratio at alpha - 1 = 0.01 deviates by
  // exp(n (alpha-1)^2 / h) - 1, which grows with n: this check fails.
  CHECK_FALSE(report.checks[2].passed);
  CHECK(report.checks[2].counted);
  CHECK(report.checks[2].deviations[0] == doctest::Approx(1.34e-3).epsilon(0.01));
  CHECK(report.checks[3].passed);
  CHECK_FALSE(report.checks[3].counted);
  CHECK_FALSE(report.all_passed());
}

TEST_CASE("uniform expansion deviation grows with n at fixed alpha") {
  CHECK(oracle::uniform_expansion_deviation(40, 1.01, 1.0) > oracle::uniform_expansion_deviation(20, 1.01, 1.0));
  CHECK(oracle::uniform_expansion_deviation(40, 1.005, 1.0) < oracle::uniform_expansion_deviation(20, 1.01, 1.0));
}

}  // TEST_SUITE
