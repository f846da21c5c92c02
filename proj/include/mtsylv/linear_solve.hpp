#pragma once

#include <memory>

#include "mtsylv/problem.hpp"

namespace mtsylv {

/// Factorization of (M + shift I), or of its transpose, computed once and
/// reused for any number of right-hand sides. Dense coefficients use partial
/// pivoting LU, sparse ones SparseLU. Immutable after construction and safe
/// to share between threads.
class ShiftedSolve {
 public:
  /// Throws Error(ShiftFailure) if the shifted matrix is numerically singular.
  ShiftedSolve(const Coefficient& M, Complex shift, bool transpose);

  Complex shift() const { return shift_; }
  bool is_real() const { return shift_.imag() == 0.0; }

  /// Real right-hand side; requires a real shift.
  Matrix solve(const Matrix& rhs) const;
  CMatrix solve(const CMatrix& rhs) const;

 private:
  struct Impl;
  Complex shift_;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace mtsylv
