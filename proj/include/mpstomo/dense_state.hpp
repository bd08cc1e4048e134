#pragma once

#include <cstdint>

#include "mpstomo/linalg.hpp"

namespace mpstomo {

/// Largest dense dimension (d^n) any operation will allocate.
inline constexpr std::int64_t kDenseGuard = std::int64_t{1} << 24;

/// Exact statevector of n qudits of local dimension d.
///
/// Index encoding: site 0 is the most significant base-d digit, so the
/// amplitude of |z_0 z_1 ... z_{n-1}> lives at sum_i z_i d^(n-1-i).
class DenseState {
 public:
  /// Validates length d^n and unit norm (within 1e-12).
  DenseState(int n, int d, Vector amplitudes);

  /// Rescales `amplitudes` to unit norm before validating.
  static DenseState normalized(int n, int d, Vector amplitudes);

  /// Computational basis state from base-d digits (site 0 first).
  static DenseState basis(int d, const std::vector<int>& digits);

  int n() const noexcept { return n_; }
  int d() const noexcept { return d_; }
  std::int64_t dim() const noexcept { return amplitudes_.size(); }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](std::int64_t index) const { return amplitudes_(index); }

 private:
  int n_;
  int d_;
  Vector amplitudes_;
};

}  // namespace mpstomo
