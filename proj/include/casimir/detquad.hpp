#pragma once

#include <functional>
#include <span>
#include <vector>

#include "casimir/kernel.hpp"

namespace casimir {

/// Controls for the frequency integral, in the mapped variable u = beta / beta_scale.
struct QuadratureSpec {
  double rel_tol = 1e-8;
  int nodes_per_panel = 32;
  double u_max = 40.0;
  int max_refinements = 12;
  /// Threads used to evaluate integrand nodes; results do not depend on it.
  int workers = 1;

  void validate() const;
};

struct IntegralResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  int panels_used = 0;
  bool converged = false;
};

/// ln det(1 - K) for a symmetric kernel, by Cholesky factorization of 1 - K.
/// Throws ContractionError when a pivot is not positive.
double logdet_one_minus(const KernelMatrix& k);
double logdet_one_minus(std::span<const double> k, int dim);

/// Integrand with several components evaluated at the same frequency,
/// e.g. the TM and TE parts of ln M(beta). Must be safe to call concurrently.
using ComponentIntegrand = std::function<void(double beta, std::span<double> out)>;

/// int_0^inf beta f_c(beta) dbeta for each component c. beta = beta_scale * u;
/// composite Gauss-Legendre over [0, u_max], panels halved where the
/// whole-vs-halves difference is largest, until the summed estimate (plus
/// the tail bound |last panel| e^{-u_max/2}) is below rel_tol of the summed
/// magnitudes or max_refinements is reached. Panels are reduced in position
/// order, so results are deterministic.
std::vector<IntegralResult> energy_integral_multi(const ComponentIntegrand& f, int components,
                                                  double beta_scale, const QuadratureSpec& q);

/// Scalar form of energy_integral_multi.
IntegralResult energy_integral(const std::function<double(double)>& f, double beta_scale,
                               const QuadratureSpec& q);

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(int order);

}  // namespace casimir
