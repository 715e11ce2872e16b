#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

/// Argument outside the mathematical domain of an operation (x <= 0, a >= b, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A recurrence under/overflowed even in log-scaled storage.
class CapacityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The internal m-summation of a kernel entry did not converge within the
/// allowed window. Carries the offending entry.
class TruncationError : public std::runtime_error {
public:
  TruncationError(const std::string& what, int n, int p)
      : std::runtime_error(what), n_(n), p_(p) {}
  int n() const noexcept { return n_; }
  int p() const noexcept { return p_; }

private:
  int n_;
  int p_;
};

/// 1 - K was not positive definite: the truncated kernel is not a contraction.
class ContractionError : public std::runtime_error {
public:
  ContractionError(const std::string& what, int pivot_index, double pivot)
      : std::runtime_error(what), index_(pivot_index), pivot_(pivot) {}
  int pivot_index() const noexcept { return index_; }
  double pivot() const noexcept { return pivot_; }

private:
  int index_;
  double pivot_;
};

/// High-precision reference evaluation could not reach its precision target.
class PrecisionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace casimir
