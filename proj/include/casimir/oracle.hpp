#pragma once

// Slow reference implementations for tests: Bessel functions from their
// defining series in 100-digit arithmetic, kernels assembled term by term in
// their raw (unsymmetrized, signed) form, determinants by permutation
// expansion, and numerical checks of the Bessel identities the kernels rely on.
// Nothing here is used by the production path.

#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "casimir/kernel.hpp"

namespace casimir::oracle {

using HighPrecReal = boost::multiprecision::cpp_bin_float_100;

/// sum_k (x/2)^{n+2k} / (k! (n+k)!) over the first `terms` terms. Throws
/// PrecisionError unless the bound on the remaining tail is below 1e-35 of
/// the sum.
HighPrecReal series_bessel_i(int n, const HighPrecReal& x, int terms);
/// Same, with the number of terms chosen automatically.
HighPrecReal series_bessel_i(int n, const HighPrecReal& x);

/// K_0 and K_1 from the ascending series with harmonic-number terms for
/// x <= 60 and from the asymptotic series (at least 20 terms, stopped at a
/// term below 1e-40) above; higher orders by upward recurrence.
HighPrecReal series_bessel_k(int n, const HighPrecReal& x);

/// K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt by the trapezoidal rule,
/// which converges geometrically for this integrand.
HighPrecReal integral_bessel_k(int n, const HighPrecReal& x);

/// Ordinary J_n and Y_n from their ascending series (moderate x only).
HighPrecReal series_bessel_j(int n, const HighPrecReal& x);
HighPrecReal series_bessel_y(int n, const HighPrecReal& x);

/// Kernel entry in its raw form
///   (-1)^{n+p} g_n(beta) sum_{|m| <= m_window} c_m(alpha beta) I_{n-m}(delta beta) I_{p-m}(delta beta)
/// with g_n = I_n/K_n, c_m = K_m/I_m (TM) or g_n = I'_n/K'_n, c_m = K'_m/I'_m (TE).
double naive_kernel_entry(const Geometry& g, double beta, int n, int p, Polarization pol,
                          int m_window);

/// All raw entries for n, p in [-n_max, n_max], row-major.
std::vector<double> naive_kernel_matrix(const Geometry& g, double beta, int n_max,
                                        Polarization pol, int m_window);

/// ln det(m) by summing over all permutations; dim <= 8. Throws DomainError
/// if the determinant is not positive.
double naive_logdet(std::span<const double> m, int dim);

/// Root in (lo, hi) of J_n(l a) Y_n(l b) - J_n(l b) Y_n(l a) (TM) or of the
/// same cross product of derivatives (TE), by bisection to 1e-30.
double concentric_cross_root(double a, double b, int n, Polarization pol, double lo, double hi);

/// |I_n(n x) K_n(alpha n x) / (K_n(n x) I_n(alpha n x)) / exp(-2 n (alpha - 1) sqrt(1 + x^2)) - 1|.
double uniform_expansion_deviation(int n, double alpha, double x);

struct IdentityCheck {
  std::string name;
  bool passed = false;
  /// Informational checks are reported but do not affect all_passed().
  bool counted = true;
  std::vector<double> deviations;
  std::string detail;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  bool all_passed() const;
};

/// Addition theorem, large-argument product rule, and uniform-expansion ratio.
IdentityReport identity_checks();

}  // namespace casimir::oracle
