#pragma once

// Data-parallel inner loops of the kernel assembly and the log-determinant.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The dispatched entry points pick the variant once per
// process (CPUID, overridable with CASIMIR_SIMD=scalar); the backend
// namespaces stay callable directly so tests can compare them.

#include <cstddef>
#include <span>

namespace casimir::simd {

enum class Backend { Scalar, Avx2 };

const char* to_string(Backend b);

/// True when the AVX2 translation unit was built and the CPU supports AVX2+FMA.
bool avx2_available();

/// Backend used by the dispatched functions below.
Backend active_backend();

/// sum_i x[i] * y[i]; x and y must have equal length.
double dot(std::span<const double> x, std::span<const double> y);

/// out[i] = exp(a[i] + b[i] + shift). Arguments below -708 produce 0.
void exp_sum(std::span<const double> a, std::span<const double> b, double shift,
             std::span<double> out);

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void exp_sum(const double* a, const double* b, double shift, double* out, std::size_t n);
}  // namespace scalar

namespace avx2 {
// Precondition: avx2_available().
double dot(const double* x, const double* y, std::size_t n);
void exp_sum(const double* a, const double* b, double shift, double* out, std::size_t n);
}  // namespace avx2

}  // namespace casimir::simd
