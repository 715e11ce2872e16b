#include <cassert>
#include <cstdlib>
#include <cstring>

#include "casimir/simd.hpp"

namespace casimir::simd {

namespace {

struct Table {
  Backend backend;
  double (*dot)(const double*, const double*, std::size_t);
  void (*exp_sum)(const double*, const double*, double, double*, std::size_t);
};

bool cpu_has_avx2() {
#if defined(CASIMIR_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Table select() {
  const char* forced = std::getenv("CASIMIR_SIMD");
  const bool want_scalar = forced != nullptr && std::strcmp(forced, "scalar") == 0;
#if defined(CASIMIR_HAVE_AVX2)
  if (!want_scalar && cpu_has_avx2()) return {Backend::Avx2, &avx2::dot, &avx2::exp_sum};
#endif
  (void)want_scalar;
  return {Backend::Scalar, &scalar::dot, &scalar::exp_sum};
}

const Table& table() {
  static const Table t = select();
  return t;
}

}  // namespace

const char* to_string(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() { return cpu_has_avx2(); }

Backend active_backend() { return table().backend; }

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return table().dot(x.data(), y.data(), x.size());
}

void exp_sum(std::span<const double> a, std::span<const double> b, double shift,
             std::span<double> out) {
  assert(a.size() == out.size() && b.size() == out.size());
  table().exp_sum(a.data(), b.data(), shift, out.data(), out.size());
}

#if !defined(CASIMIR_HAVE_AVX2)
// Stubs keep the backend namespace linkable on targets without the AVX2 unit.
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n) { return scalar::dot(x, y, n); }
void exp_sum(const double* a, const double* b, double shift, double* out, std::size_t n) {
  scalar::exp_sum(a, b, shift, out, n);
}
}  // namespace avx2
#endif

}  // namespace casimir::simd
