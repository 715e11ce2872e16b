#include "casimir/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "casimir/errors.hpp"
#include "casimir/simd.hpp"

namespace casimir {

namespace {

constexpr double kTailRatio = 1e-16;
constexpr int kMaxWindow = 1 << 16;

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("kernel: beta must be positive and finite, got " + std::to_string(beta));
  }
}

// log g_n(x) for n = 0..n_max; c_m(x) = 1/g_m(x).
std::vector<double> log_g_seq(double x, int n_max, Polarization pol) {
  const auto arr = detail::log_bessel_arrays(x, std::max(n_max, 1), pol == Polarization::TE);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    out[n] = pol == Polarization::TM ? arr.log_i[n] - arr.log_k[n] : arr.log_di[n] - arr.log_dk[n];
  }
  return out;
}

std::vector<double> concentric_diagonal(const std::vector<double>& log_g_inner,
                                        const std::vector<double>& log_g_outer, int n_max) {
  std::vector<double> d(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) d[n] = std::exp(log_g_inner[n] - log_g_outer[n]);
  return d;
}

}  // namespace

void Geometry::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(eps) || !std::isfinite(len)) {
    throw DomainError("geometry: all lengths must be finite");
  }
  if (!(a > 0.0)) throw DomainError("geometry: inner radius a must be > 0");
  if (!(b > a)) throw DomainError("geometry: outer radius b must exceed inner radius a");
  if (!(eps >= 0.0)) throw DomainError("geometry: eccentricity eps must be >= 0");
  if (!(len > 0.0)) throw DomainError("geometry: length must be > 0");
  if (!(gap() > 0.0)) {
    throw DomainError("geometry: shells intersect (need alpha - 1 > delta, i.e. eps < b - a)");
  }
}

void CylPlaneGeometry::validate() const {
  if (!std::isfinite(a) || !std::isfinite(height) || !std::isfinite(len)) {
    throw DomainError("cylinder-plane geometry: all lengths must be finite");
  }
  if (!(a > 0.0)) throw DomainError("cylinder-plane geometry: radius a must be > 0");
  if (!(height > a)) throw DomainError("cylinder-plane geometry: need H > a (cylinder above plane)");
  if (!(len > 0.0)) throw DomainError("cylinder-plane geometry: length must be > 0");
}

void Truncation::validate() const {
  if (n_max < 1) throw DomainError("truncation: n_max must be >= 1");
  if (m_max < n_max) throw DomainError("truncation: m_max must be >= n_max");
}

KernelMatrix::KernelMatrix(double beta, Polarization pol, int n_max, int m_max_used,
                           std::vector<double> entries)
    : beta_(beta), pol_(pol), n_max_(n_max), m_max_used_(m_max_used), entries_(std::move(entries)) {}

int default_m_window(int n_max, double delta_beta) {
  return n_max + static_cast<int>(std::ceil(std::numbers::e * delta_beta)) + 8;
}

namespace {

// With excess set, the m = n term of each diagonal entry is replaced by
// c_n g_n (I_0(x)^2 - 1), so the result is K(eps) - K(0) without cancellation.
KernelMatrix assemble_eccentric(const Geometry& g, double beta, Truncation t, Polarization pol,
                                bool excess) {
  g.validate();
  t.validate();
  require_beta(beta);

  const int n_max = t.n_max;
  const int dim = 2 * n_max + 1;
  const double x = g.delta() * beta;
  const auto log_g = log_g_seq(beta, n_max, pol);

  if (x == 0.0) {
    std::vector<double> k(static_cast<std::size_t>(dim) * dim, 0.0);
    if (!excess) {
      const auto d = concentric_diagonal(log_g, log_g_seq(g.alpha() * beta, n_max, pol), n_max);
      for (int n = -n_max; n <= n_max; ++n) {
        const auto i = static_cast<std::size_t>(n + n_max);
        k[i * dim + i] = d[std::abs(n)];
      }
    }
    return KernelMatrix(beta, pol, n_max, 0, std::move(k));
  }

  int m_max = std::max(t.m_max, default_m_window(n_max, x));
  for (;;) {
    const int width = 2 * m_max + 1;
    const int order_span = n_max + m_max;

    // c_m(alpha beta) halves, laid out for m = -m_max..m_max.
    const auto log_g_outer = log_g_seq(g.alpha() * beta, m_max, pol);
    std::vector<double> half_log_c(static_cast<std::size_t>(width));
    for (int m = -m_max; m <= m_max; ++m) half_log_c[m + m_max] = -0.5 * log_g_outer[std::abs(m)];

    // log I_{|k|}(delta beta) mirrored so that k = m - n runs contiguously.
    const auto log_i = detail::log_bessel_i(x, order_span);
    std::vector<double> log_i_mirror(static_cast<std::size_t>(2 * order_span + 1));
    for (int k = -order_span; k <= order_span; ++k) log_i_mirror[k + order_span] = log_i[std::abs(k)];

    std::vector<double> u(static_cast<std::size_t>(dim) * width);
    for (int n = -n_max; n <= n_max; ++n) {
      const auto row = static_cast<std::size_t>(n + n_max) * width;
      // m = -m_max corresponds to k = m - n = -m_max - n.
      const double* li = log_i_mirror.data() + (-m_max - n + order_span);
      simd::exp_sum(half_log_c, std::span<const double>(li, width), 0.5 * log_g[std::abs(n)],
                    std::span<double>(u.data() + row, width));
    }

    std::vector<double> k(static_cast<std::size_t>(dim) * dim);
    int bad_n = 0, bad_p = 0;
    bool converged = true;
    for (int i = 0; i < dim; ++i) {
      const std::span<const double> ui(u.data() + static_cast<std::size_t>(i) * width, width);
      for (int j = i; j < dim; ++j) {
        const std::span<const double> uj(u.data() + static_cast<std::size_t>(j) * width, width);
        double s = simd::dot(ui, uj);
        double scale = s;
        if (excess && i == j) {
          // Column m = n sits at offset n + m_max = i - n_max + m_max.
          const int c = i - n_max + m_max;
          const double own = std::exp(log_g[std::abs(i - n_max)] + 2.0 * half_log_c[c]);
          s = simd::dot(ui.first(c), ui.first(c)) + simd::dot(ui.subspan(c + 1), ui.subspan(c + 1)) +
              own * std::expm1(2.0 * log_i[0]);
          scale = s + own;
        }
        k[static_cast<std::size_t>(i) * dim + j] = s;
        k[static_cast<std::size_t>(j) * dim + i] = s;
        const double edge = ui.front() * uj.front() + ui.back() * uj.back();
        if (converged && edge > kTailRatio * scale) {
          converged = false;
          bad_n = i - n_max;
          bad_p = j - n_max;
        }
      }
    }
    if (converged) return KernelMatrix(beta, pol, n_max, m_max, std::move(k));
    if (2 * m_max > kMaxWindow) {
      throw TruncationError("kernel: m-sum not converged for entry (" + std::to_string(bad_n) +
                                ", " + std::to_string(bad_p) + ") with m_max = " +
                                std::to_string(m_max),
                            bad_n, bad_p);
    }
    m_max *= 2;
  }
}

}  // namespace

KernelMatrix build_kernel_eccentric(const Geometry& g, double beta, Truncation t, Polarization pol) {
  return assemble_eccentric(g, beta, t, pol, false);
}

KernelMatrix build_kernel_eccentric_excess(const Geometry& g, double beta, Truncation t,
                                           Polarization pol) {
  return assemble_eccentric(g, beta, t, pol, true);
}

std::vector<double> build_kernel_concentric(double alpha, double beta, int n_max, Polarization pol) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw DomainError("concentric kernel: alpha must be > 1");
  }
  require_beta(beta);
  if (n_max < 0) throw DomainError("concentric kernel: n_max must be >= 0");
  return concentric_diagonal(log_g_seq(beta, n_max, pol), log_g_seq(alpha * beta, n_max, pol), n_max);
}

KernelMatrix build_kernel_cylplane(const CylPlaneGeometry& g, double beta, Truncation t,
                                   Polarization pol) {
  g.validate();
  t.validate();
  require_beta(beta);
  const int n_max = t.n_max;
  const int dim = 2 * n_max + 1;
  const auto log_g = log_g_seq(beta, n_max, pol);
  const auto log_k = detail::log_bessel_arrays(2.0 * beta * g.height / g.a, 2 * n_max, false).log_k;

  std::vector<double> half(static_cast<std::size_t>(dim));
  for (int n = -n_max; n <= n_max; ++n) half[n + n_max] = 0.5 * log_g[std::abs(n)];
  std::vector<double> k(static_cast<std::size_t>(dim) * dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      const int order = std::abs((i - n_max) + (j - n_max));
      const double v = std::exp(half[i] + half[j] + log_k[order]);
      k[static_cast<std::size_t>(i) * dim + j] = v;
      k[static_cast<std::size_t>(j) * dim + i] = v;
    }
  }
  return KernelMatrix(beta, pol, n_max, 0, std::move(k));
}

std::vector<TridiagTerms> tridiag_series(const Geometry& g, double beta, int n_max,
                                         Polarization pol) {
  g.validate();
  require_beta(beta);
  if (n_max < 0) throw DomainError("tridiagonal terms: n_max must be >= 0");
  const auto log_g = log_g_seq(beta, n_max + 1, pol);
  const auto log_c_neg = log_g_seq(g.alpha() * beta, n_max + 1, pol);  // log c = -this
  auto lc = [&](int m) { return -log_c_neg[std::abs(m)]; };

  std::vector<TridiagTerms> out(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    const double lg = log_g[n];
    TridiagTerms& t = out[n];
    t.dcc = std::exp(lg + lc(n));
    t.dqc = 0.5 * t.dcc + 0.25 * (std::exp(lg + lc(n - 1)) + std::exp(lg + lc(n + 1)));
    const double half_gg = 0.5 * (lg + log_g[n + 1]);
    const double s = std::exp(half_gg + lc(n)) + std::exp(half_gg + lc(n + 1));
    t.nqc = 0.25 * s * s;
  }
  return out;
}

TridiagTerms tridiag_terms(const Geometry& g, double beta, int n, Polarization pol) {
  const int order = std::abs(n);
  const auto series = tridiag_series(g, beta, order, pol);
  TridiagTerms t = series[order];
  if (n < 0) {
    // The pair (n, n+1) with n < 0 mirrors (|n|-1, |n|).
    t.nqc = series[order - 1].nqc;
  }
  return t;
}

namespace {

// Signed determinant by LU with partial pivoting (dense, small).
double lu_determinant(std::vector<double> a, int dim) {
  double det = 1.0;
  for (int c = 0; c < dim; ++c) {
    int piv = c;
    for (int r = c + 1; r < dim; ++r) {
      if (std::fabs(a[r * dim + c]) > std::fabs(a[piv * dim + c])) piv = r;
    }
    const double pv = a[piv * dim + c];
    if (pv == 0.0) return 0.0;
    if (piv != c) {
      for (int k = 0; k < dim; ++k) std::swap(a[c * dim + k], a[piv * dim + k]);
      det = -det;
    }
    det *= pv;
    for (int r = c + 1; r < dim; ++r) {
      const double f = a[r * dim + c] / pv;
      if (f == 0.0) continue;
      for (int k = c + 1; k < dim; ++k) a[r * dim + k] -= f * a[c * dim + k];
    }
  }
  return det;
}

// Value or derivative of an ordinary Bessel function at signed order n.
double cyl(const std::vector<double>& f, int n, bool derivative) {
  auto at = [&](int k) {
    const int ak = std::abs(k);
    return (k < 0 && ak % 2 == 1) ? -f[ak] : f[ak];
  };
  if (!derivative) return at(n);
  return 0.5 * (at(n - 1) - at(n + 1));
}

}  // namespace

double q_matrix_det(double lambda, const Geometry& g, Truncation t, Polarization pol) {
  g.validate();
  t.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("q_matrix_det: lambda must be positive and finite");
  }
  const int n_max = t.n_max;
  const int dim = 2 * n_max + 1;
  const bool prime = pol == Polarization::TE;
  const auto in = ord_bessel_seq(lambda * g.a, n_max + 1);
  const auto out = ord_bessel_seq(lambda * g.b, n_max + 1);
  std::vector<double> shift;  // J_k(lambda eps), k = 0..2 n_max
  if (g.eps > 0.0) shift = ord_bessel_seq(lambda * g.eps, 2 * n_max).j;

  auto coupling = [&](int k) {
    if (g.eps == 0.0) return k == 0 ? 1.0 : 0.0;
    return cyl(shift, k, false);
  };
  auto cross = [&](int m, int n) {
    return cyl(in.j, n, prime) * cyl(out.y, m, prime) - cyl(out.j, m, prime) * cyl(in.y, n, prime);
  };

  std::vector<double> scale(static_cast<std::size_t>(dim));
  for (int n = -n_max; n <= n_max; ++n) {
    const double d = std::fabs(cross(n, n));
    if (d == 0.0) return 0.0;
    scale[n + n_max] = 1.0 / std::sqrt(d);
  }
  std::vector<double> q(static_cast<std::size_t>(dim) * dim);
  for (int m = -n_max; m <= n_max; ++m) {
    for (int n = -n_max; n <= n_max; ++n) {
      q[(m + n_max) * dim + (n + n_max)] =
          cross(m, n) * coupling(n - m) * scale[m + n_max] * scale[n + n_max];
    }
  }
  return lu_determinant(std::move(q), dim);
}

}  // namespace casimir
