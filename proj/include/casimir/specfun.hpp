#pragma once

// Overflow-safe modified Bessel functions of integer order.
//
// I_n(x) and K_n(x) span hundreds of decades across the orders and arguments
// used by the kernels (I_n ~ e^x, K_n ~ e^-x, K_n(x) ~ (n-1)! (2/x)^n), so
// sequences are held as sign/log-magnitude pairs. Ordinary J_n, Y_n are only
// needed at moderate arguments for the mode matrices and are kept unscaled.

#include <cmath>
#include <vector>

namespace casimir {

enum class Polarization { TM, TE };

inline const char* to_string(Polarization pol) { return pol == Polarization::TM ? "TM" : "TE"; }

/// sign * exp(log_magnitude).
struct LogScaled {
  double log_magnitude = 0.0;
  int sign = 1;

  static LogScaled from_value(double v) {
    return {std::log(std::fabs(v)), v < 0 ? -1 : 1};
  }
  double value() const { return sign * std::exp(log_magnitude); }

  friend LogScaled operator*(LogScaled a, LogScaled b) {
    return {a.log_magnitude + b.log_magnitude, a.sign * b.sign};
  }
  friend LogScaled operator/(LogScaled a, LogScaled b) {
    return {a.log_magnitude - b.log_magnitude, a.sign * b.sign};
  }
};

/// I_n, K_n and their derivatives for orders 0..n_max at one argument.
struct BesselSeq {
  double x = 0.0;
  int n_max = 0;
  std::vector<LogScaled> i_vals;
  std::vector<LogScaled> k_vals;
  std::vector<LogScaled> i_deriv;
  std::vector<LogScaled> k_deriv;
};

/// Sequences of I_n(x), K_n(x), I'_n(x), K'_n(x) for n = 0..n_max.
///
/// K is generated by upward recurrence from K_0, K_1 (ascending series for
/// x <= 2, Steed's continued fraction above), I by Miller's backward
/// recurrence on the ratios I_{n+1}/I_n normalized to an independent I_0.
/// Throws DomainError for x <= 0 or non-finite x, CapacityError if a log
/// magnitude leaves the finite range.
BesselSeq mod_bessel_seq(double x, int n_max);

/// g_n = I_n/K_n (TM) or -I'_n/K'_n (TE); strictly positive.
LogScaled bessel_ratio_g(int n, double x, Polarization pol);

/// Ordinary Bessel functions J_n(x), Y_n(x) for n = 0..n_max.
struct OrdBesselSeq {
  double x = 0.0;
  int n_max = 0;
  std::vector<double> j;
  std::vector<double> y;
};

/// J by Miller downward recurrence normalized with J_0 + 2 sum J_2k = 1;
/// Y_0, Y_1 from the Neumann series over the same J sequence, then upward.
OrdBesselSeq ord_bessel_seq(double x, int n_max);

namespace detail {

// Plain log-magnitude arrays, the form the kernel builders consume.
// All have size n_max + 1 (orders 0..n_max).
struct LogBesselArrays {
  std::vector<double> log_i;
  std::vector<double> log_k;
  std::vector<double> log_di;  // log I'_n      (I'_n > 0)
  std::vector<double> log_dk;  // log |K'_n|    (K'_n < 0)
};

LogBesselArrays log_bessel_arrays(double x, int n_max, bool with_derivatives);

// log I_n(x) for n = 0..n_max only (no K); x > 0.
std::vector<double> log_bessel_i(double x, int n_max);

// log K_0(x), log K_1(x).
void log_bessel_k01(double x, double& log_k0, double& log_k1);

// log I_0(x) from the ascending series (x <= 20) or the asymptotic series.
double log_bessel_i0(double x);

}  // namespace detail

}  // namespace casimir
