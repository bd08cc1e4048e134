#pragma once

#include "mpstomo/linalg.hpp"

namespace mpstomo {

/// Unit-trace positive semidefinite Hermitian matrix.
class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-12), PSD (min eigenvalue >= -1e-10) and unit
  /// trace (1e-10); throws NotADensityMatrix otherwise.
  explicit DensityMatrix(Matrix entries);

  /// Symmetrizes, clips negative eigenvalues to zero and renormalizes the
  /// trace. Used for estimates that noise has pushed outside the state space.
  static DensityMatrix repaired(const Matrix& estimate);

  Eigen::Index dim() const noexcept { return entries_.rows(); }
  const Matrix& entries() const noexcept { return entries_; }

  /// Eigenvalues in descending order.
  Eigen::VectorXd spectrum() const;

 private:
  Matrix entries_;
};

}  // namespace mpstomo
