#pragma once

#include <vector>

#include "mpstomo/linalg.hpp"

namespace mpstomo {

/// d matrices A^z for one site, each of shape (left bond) x (right bond).
using SiteTensor = std::vector<Matrix>;

enum class Gauge { None, LeftCanonical, RightCanonical };

/// Open-boundary matrix product state
///
///   c_{z_0..z_{n-1}} = left * A_0^{z_0} * ... * A_{n-1}^{z_{n-1}} * right
///
/// with explicit boundary vectors so that representations whose outer bonds
/// are larger than one (for instance the tomography output, whose left
/// boundary is <0...0| and right boundary is the residual state) fit without
/// reshaping.
class MpsState {
 public:
  /// Throws InconsistentBonds if the chain does not contract.
  MpsState(int d, std::vector<SiteTensor> sites, RowVector left, Vector right,
           Gauge gauge = Gauge::None);

  /// Same, with trivial length-1 boundaries.
  MpsState(int d, std::vector<SiteTensor> sites, Gauge gauge = Gauge::None);

  int n() const noexcept { return static_cast<int>(sites_.size()); }
  int d() const noexcept { return d_; }
  Gauge gauge() const noexcept { return gauge_; }

  const std::vector<SiteTensor>& sites() const noexcept { return sites_; }
  const SiteTensor& site(int i) const { return sites_.at(static_cast<std::size_t>(i)); }
  const RowVector& left() const noexcept { return left_; }
  const Vector& right() const noexcept { return right_; }

  /// Bond dimensions chi_0..chi_n; chi_0 is the left boundary length.
  std::vector<Eigen::Index> bond_dimensions() const;
  Eigen::Index max_bond() const;

  /// sqrt(<psi|psi>) by transfer-matrix contraction.
  double norm() const;

  /// Returns a copy scaled to unit norm.
  MpsState normalized() const;

  /// Max deviation of sum_z A^z(dagger) A^z from identity over non-terminal sites.
  double left_canonical_defect() const;
  /// Max deviation of sum_z A^z A^z(dagger) from identity over non-initial sites.
  double right_canonical_defect() const;

 private:
  int d_;
  std::vector<SiteTensor> sites_;
  RowVector left_;
  Vector right_;
  Gauge gauge_;
};

}  // namespace mpstomo
