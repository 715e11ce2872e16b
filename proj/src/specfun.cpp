#include "casimir/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "casimir/errors.hpp"

namespace casimir {

namespace {

constexpr double kEulerGamma = std::numbers::egamma;
constexpr double kPi = std::numbers::pi;

void require_positive_finite(double x, const char* who) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(who) + ": argument must be positive and finite, got " +
                      std::to_string(x));
  }
}

void require_finite_log(double v, int order, double x) {
  if (!std::isfinite(v)) {
    throw CapacityError("modified Bessel recurrence left the log-scaled range at order " +
                        std::to_string(order) + ", x = " + std::to_string(x));
  }
}

// Start order for the backward ratio recurrence. Besides the usual
// n_max + 10 + 2 sqrt(n_max x) margin, the start must clear sqrt(80 x):
// the start-up error decays like exp(-(N^2 - n^2)/x) when n << x.
int miller_start(int n_max, double x) {
  const double margin =
      std::max(10.0 + 2.0 * std::sqrt(n_max * x), std::sqrt(80.0 * x) + 10.0);
  return n_max + static_cast<int>(std::ceil(margin));
}

// Ratios r_k = I_{k+1}(x)/I_k(x) for k = 0..count-1.
std::vector<double> bessel_i_ratios(double x, int count) {
  const int start = miller_start(count, x);
  std::vector<double> ratio(static_cast<std::size_t>(count));
  double r = 0.0;
  for (int k = start; k >= 0; --k) {
    // r_k = 1 / (2(k+1)/x + r_{k+1})
    r = 1.0 / (2.0 * (k + 1) / x + r);
    if (k < count) ratio[static_cast<std::size_t>(k)] = r;
  }
  return ratio;
}

// Ascending series for I_0 and I_1 (small x only).
void series_i01(double x, double& i0, double& i1) {
  const double q = 0.25 * x * x;
  double t0 = 1.0, t1 = 0.5 * x;
  i0 = t0;
  i1 = t1;
  for (int k = 1; k < 200; ++k) {
    t0 *= q / (static_cast<double>(k) * k);
    t1 *= q / (static_cast<double>(k) * (k + 1));
    i0 += t0;
    i1 += t1;
    if (t0 < 1e-17 * i0 && t1 < 1e-17 * i1) break;
  }
}

}  // namespace

namespace detail {

double log_bessel_i0(double x) {
  require_positive_finite(x, "log_bessel_i0");
  if (x <= 20.0) {
    // log1p keeps the tiny-argument value exact to relative precision.
    const double q = 0.25 * x * x;
    double t = 1.0, tail = 0.0;
    for (int k = 1; k < 400; ++k) {
      t *= q / (static_cast<double>(k) * k);
      tail += t;
      if (t < 1e-17 * (1.0 + tail)) break;
    }
    return std::log1p(tail);
  }
  // I_0(x) ~ e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
  double t = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = t * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (next > t) break;
    t = next;
    sum += t;
    if (t < 1e-17 * sum) break;
  }
  return x - 0.5 * std::log(2.0 * kPi * x) + std::log(sum);
}

void log_bessel_k01(double x, double& log_k0, double& log_k1) {
  require_positive_finite(x, "log_bessel_k01");
  if (x <= 2.0) {
    double i0, i1;
    series_i01(x, i0, i1);
    const double q = 0.25 * x * x;
    const double lx = std::log(0.5 * x);
    // K_0 = -(ln(x/2) + gamma) I_0 + sum_{k>=1} q^k/(k!)^2 H_k
    double t = 1.0, harmonic = 0.0, s0 = 0.0;
    for (int k = 1; k < 200; ++k) {
      t *= q / (static_cast<double>(k) * k);
      harmonic += 1.0 / k;
      s0 += t * harmonic;
      if (t * harmonic < 1e-17 * std::fabs(s0)) break;
    }
    const double k0 = -(lx + kEulerGamma) * i0 + s0;
    // K_1 = 1/x + ln(x/2) I_1 - (x/4) sum_{k>=0} [psi(k+1)+psi(k+2)] q^k/(k!(k+1)!)
    double u = 1.0, hk = 0.0, s1 = 0.0;
    for (int k = 0; k < 200; ++k) {
      if (k > 0) {
        u *= q / (static_cast<double>(k) * (k + 1));
        hk += 1.0 / k;
      }
      const double psi_sum = (-kEulerGamma + hk) + (-kEulerGamma + hk + 1.0 / (k + 1));
      const double term = psi_sum * u;
      s1 += term;
      if (k > 0 && std::fabs(term) < 1e-17 * std::fabs(s1)) break;
    }
    const double k1 = 1.0 / x + lx * i1 - 0.25 * x * s1;
    log_k0 = std::log(k0);
    log_k1 = std::log(k1);
    return;
  }
  // Steed's method on the continued fraction CF2 (Temme), order 0.
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < 100000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < 1e-17) break;
  }
  h *= a1;
  log_k0 = 0.5 * std::log(kPi / (2.0 * x)) - x - std::log(s);
  log_k1 = log_k0 + std::log((x + 0.5 - h) / x);
}

std::vector<double> log_bessel_i(double x, int n_max) {
  require_positive_finite(x, "log_bessel_i");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  const auto ratio = bessel_i_ratios(x, n_max);
  out[0] = log_bessel_i0(x);
  for (int n = 0; n < n_max; ++n) {
    out[n + 1] = out[n] + std::log(ratio[n]);
    require_finite_log(out[n + 1], n + 1, x);
  }
  return out;
}

LogBesselArrays log_bessel_arrays(double x, int n_max, bool with_derivatives) {
  require_positive_finite(x, "mod_bessel_seq");
  if (n_max < 0) throw DomainError("mod_bessel_seq: negative maximum order");
  const auto size = static_cast<std::size_t>(n_max) + 1;

  // One extra order for the derivative relations.
  const auto r = bessel_i_ratios(x, n_max + 1);
  LogBesselArrays out;
  out.log_i.resize(size);
  out.log_k.resize(size);
  out.log_i[0] = log_bessel_i0(x);
  for (int n = 0; n < n_max; ++n) {
    out.log_i[n + 1] = out.log_i[n] + std::log(r[n]);
    require_finite_log(out.log_i[n + 1], n + 1, x);
  }

  // q_n = K_{n+1}/K_n, upward: q_n = 1/q_{n-1} + 2n/x.
  std::vector<double> qk(size);
  double lk0, lk1;
  log_bessel_k01(x, lk0, lk1);
  out.log_k[0] = lk0;
  qk[0] = std::exp(lk1 - lk0);
  for (int n = 1; n <= n_max; ++n) qk[n] = 1.0 / qk[n - 1] + 2.0 * n / x;
  for (int n = 0; n < n_max; ++n) {
    out.log_k[n + 1] = (n == 0) ? lk1 : out.log_k[n] + std::log(qk[n]);
    require_finite_log(out.log_k[n + 1], n + 1, x);
  }
  require_finite_log(out.log_k[0], 0, x);

  if (with_derivatives) {
    out.log_di.resize(size);
    out.log_dk.resize(size);
    // I'_0 = I_1, I'_n = (I_{n-1} + I_{n+1})/2; K'_0 = -K_1, K'_n = -(K_{n-1} + K_{n+1})/2.
    out.log_di[0] = out.log_i[0] + std::log(r[0]);
    out.log_dk[0] = lk1;
    for (int n = 1; n <= n_max; ++n) {
      out.log_di[n] = out.log_i[n] + std::log(0.5 * (1.0 / r[n - 1] + r[n]));
      out.log_dk[n] = out.log_k[n] + std::log(0.5 * (1.0 / qk[n - 1] + qk[n]));
      require_finite_log(out.log_di[n], n, x);
      require_finite_log(out.log_dk[n], n, x);
    }
  }
  return out;
}

}  // namespace detail

BesselSeq mod_bessel_seq(double x, int n_max) {
  require_positive_finite(x, "mod_bessel_seq");
  if (n_max < 1) throw DomainError("mod_bessel_seq: n_max must be >= 1");
  const auto arr = detail::log_bessel_arrays(x, n_max, true);
  BesselSeq seq;
  seq.x = x;
  seq.n_max = n_max;
  const auto size = static_cast<std::size_t>(n_max) + 1;
  seq.i_vals.resize(size);
  seq.k_vals.resize(size);
  seq.i_deriv.resize(size);
  seq.k_deriv.resize(size);
  for (std::size_t n = 0; n < size; ++n) {
    seq.i_vals[n] = {arr.log_i[n], 1};
    seq.k_vals[n] = {arr.log_k[n], 1};
    seq.i_deriv[n] = {arr.log_di[n], 1};
    seq.k_deriv[n] = {arr.log_dk[n], -1};
  }
  return seq;
}

LogScaled bessel_ratio_g(int n, double x, Polarization pol) {
  const int order = std::abs(n);
  const auto arr = detail::log_bessel_arrays(x, std::max(order, 1), pol == Polarization::TE);
  if (pol == Polarization::TM) return {arr.log_i[order] - arr.log_k[order], 1};
  return {arr.log_di[order] - arr.log_dk[order], 1};
}

OrdBesselSeq ord_bessel_seq(double x, int n_max) {
  require_positive_finite(x, "ord_bessel_seq");
  if (n_max < 1) throw DomainError("ord_bessel_seq: n_max must be >= 1");

  const double top = std::max(static_cast<double>(n_max), x);
  int start = static_cast<int>(top) + 20 + static_cast<int>(std::sqrt(40.0 * top));
  start += start % 2;

  std::vector<double> v(static_cast<std::size_t>(start) + 2, 0.0);
  v[start] = 1e-30;
  for (int k = start; k >= 1; --k) {
    v[k - 1] = (2.0 * k / x) * v[k] - v[k + 1];
    if (std::fabs(v[k - 1]) > 1e250) {
      for (int j = k - 1; j <= start; ++j) v[j] *= 1e-250;
    }
  }
  double norm = v[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * v[k];
  for (auto& e : v) e /= norm;

  OrdBesselSeq out;
  out.x = x;
  out.n_max = n_max;
  out.j.assign(v.begin(), v.begin() + n_max + 1);

  const double lg = std::log(0.5 * x) + kEulerGamma;
  double s0 = 0.0, s1 = 0.0;
  for (int k = 1; 2 * k + 1 <= start; ++k) {
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    s0 += sgn * v[2 * k] / k;
    s1 += sgn * (v[2 * k - 1] - v[2 * k + 1]) / k;
  }
  out.y.resize(static_cast<std::size_t>(n_max) + 1);
  out.y[0] = (2.0 / kPi) * (lg * v[0] - 2.0 * s0);
  out.y[1] = (2.0 / kPi) * (lg * v[1] - v[0] / x + s1);
  for (int n = 1; n < n_max; ++n) out.y[n + 1] = (2.0 * n / x) * out.y[n] - out.y[n - 1];
  return out;
}

}  // namespace casimir
