#pragma once

// Truncated scattering kernels A(beta) at imaginary frequency beta = y a.
//
// The kernel for eccentric cylinders is not symmetric as it comes out of the
// mode matching; det(1 - A) is invariant under the similarity
// diag(sqrt g) A diag(1/sqrt g) and under the sign flips (-1)^{n+p}, and
// after both the matrix is the Gram matrix
//
//   K(n,p) = sum_m U(n,m) U(p,m),   U(n,m) = sqrt(g_n c_m) I_{n-m}(delta beta),
//
// which is what we build: symmetric, entrywise non-negative, and positive
// semidefinite by construction.

#include <span>
#include <vector>

#include "casimir/specfun.hpp"

namespace casimir {

/// Two eccentric perfectly conducting cylinders: inner radius a, outer b,
/// axis offset eps, length len.
struct Geometry {
  double a = 1.0;
  double b = 2.0;
  double eps = 0.0;
  double len = 1.0;

  double alpha() const { return b / a; }
  double delta() const { return eps / a; }
  /// alpha - 1 - delta: closest approach of the shells in units of a.
  double gap() const { return alpha() - 1.0 - delta(); }

  /// Throws DomainError naming the violated invariant.
  void validate() const;

  static Geometry from_ratios(double alpha, double delta, double a = 1.0, double len = 1.0) {
    return {a, alpha * a, delta * a, len};
  }
};

/// Cylinder of radius a whose axis is a distance height from a plane.
struct CylPlaneGeometry {
  double a = 1.0;
  double height = 2.0;
  double len = 1.0;

  void validate() const;
};

/// Kernel index window n in [-n_max, n_max]; internal sum m in [-m_max, m_max].
struct Truncation {
  int n_max = 8;
  int m_max = 8;

  void validate() const;
};

class KernelMatrix {
public:
  KernelMatrix(double beta, Polarization pol, int n_max, int m_max_used,
               std::vector<double> entries);

  double beta() const { return beta_; }
  Polarization pol() const { return pol_; }
  int n_max() const { return n_max_; }
  int dim() const { return 2 * n_max_ + 1; }
  /// Width of the m-window after adaptive widening (0 when no m-sum is involved).
  int m_max_used() const { return m_max_used_; }

  /// Entry (n, p), both in [-n_max, n_max].
  double operator()(int n, int p) const {
    return entries_[static_cast<std::size_t>(n + n_max_) * dim() + (p + n_max_)];
  }
  /// Row-major dim x dim storage; row i holds n = i - n_max.
  std::span<const double> data() const { return entries_; }

private:
  double beta_;
  Polarization pol_;
  int n_max_;
  int m_max_used_;
  std::vector<double> entries_;
};

/// Initial half-width of the m-window: n_max + ceil(e * delta * beta) + 8.
int default_m_window(int n_max, double delta_beta);

/// Symmetrized eccentric kernel. The m-window starts at
/// max(t.m_max, default_m_window) and doubles until the edge terms of every
/// entry fall below 1e-16 of the entry; TruncationError if that never happens.
KernelMatrix build_kernel_eccentric(const Geometry& g, double beta, Truncation t, Polarization pol);

/// build_kernel_eccentric minus its eps = 0 diagonal, assembled term by term so
/// that small eccentricities keep full relative precision.
KernelMatrix build_kernel_eccentric_excess(const Geometry& g, double beta, Truncation t,
                                           Polarization pol);

/// Diagonal of the concentric kernel d_n, n = 0..n_max:
/// I_n(b)K_n(ab)/(K_n(b)I_n(ab)) for TM, primed functions for TE.
std::vector<double> build_kernel_concentric(double alpha, double beta, int n_max, Polarization pol);

/// Symmetrized cylinder-plane kernel sqrt(g_n g_p) K_{|n+p|}(2 beta H / a).
KernelMatrix build_kernel_cylplane(const CylPlaneGeometry& g, double beta, Truncation t,
                                   Polarization pol);

/// Quasi-concentric (tridiagonal) ingredients for index n:
/// dcc = concentric diagonal, dqc = diagonal O(delta^2) coefficient,
/// nqc = product of the (n, n+1) and (n+1, n) couplings, both divided by
/// the appropriate power of delta beta.
struct TridiagTerms {
  double dcc = 0.0;
  double dqc = 0.0;
  double nqc = 0.0;
};

TridiagTerms tridiag_terms(const Geometry& g, double beta, int n, Polarization pol);

/// tridiag_terms for n = 0..n_max from one set of Bessel sequences.
std::vector<TridiagTerms> tridiag_series(const Geometry& g, double beta, int n_max,
                                         Polarization pol);

/// Determinant of the real-frequency mode matrix Q(lambda), rescaled so every
/// diagonal cross-product has unit magnitude. Its zeros are the classical
/// eigenvalues lambda of the annulus; returns exactly 0 when a diagonal
/// cross-product vanishes.
double q_matrix_det(double lambda, const Geometry& g, Truncation t, Polarization pol);

}  // namespace casimir
