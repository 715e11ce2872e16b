#include <cmath>

#include "casimir/simd.hpp"

namespace casimir::simd::scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void exp_sum(const double* a, const double* b, double shift, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a[i] + b[i] + shift;
    out[i] = t < -708.0 ? 0.0 : std::exp(t);
  }
}

}  // namespace casimir::simd::scalar
