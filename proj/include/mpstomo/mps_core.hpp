#pragma once

#include <vector>

#include "mpstomo/dense_state.hpp"
#include "mpstomo/density_matrix.hpp"
#include "mpstomo/mps_state.hpp"

// Site indices throughout the library are zero-based.

namespace mpstomo {

/// Full contraction; output normalized. Throws SizeExceeded past kDenseGuard.
DenseState dense_from_mps(const MpsState& state);

/// Sequential SVD factorization into a left-canonical MPS. At every cut,
/// singular values at or below tol * (largest) are discarded, together with
/// numerical zeros below kSingularFloor * (largest).
MpsState mps_from_dense(const DenseState& state, double tol = 0.0);

Complex inner_product(const DenseState& a, const DenseState& b);
Complex inner_product(const MpsState& a, const MpsState& b);

/// Partial trace onto sites [first, first + k).
DensityMatrix reduced_density_matrix(const DenseState& state, int first, int k);

/// Applies a d^k x d^k unitary to sites [first, first + k), k inferred from
/// the matrix size.
DenseState apply_window_unitary(const DenseState& state, const Matrix& u, int first);

/// MPS version: contracts the window, applies u and re-splits it with
/// untruncated SVDs (numerical zeros dropped). Result carries Gauge::None.
MpsState apply_window_unitary(const MpsState& state, const Matrix& u, int first);

struct Postselection {
  DenseState state;
  double probability;
};

/// Projects `site` onto |0>, renormalizes, and reports the probability of
/// that outcome. Throws ZeroProbability below 1e-14.
Postselection postselect_zero(const DenseState& state, int site);

/// Squared Schmidt coefficients across the cut between sites [0, cut) and
/// [cut, n), descending.
Eigen::VectorXd schmidt_spectrum(const DenseState& state, int cut);

/// Left-canonical copy with trivial boundaries (QR sweep), normalized.
MpsState left_canonicalize(const MpsState& state);

/// Right-canonical copy with trivial boundaries (LQ sweep), normalized.
MpsState right_canonicalize(const MpsState& state);

/// Left-canonicalizes, then truncates every bond with a right-to-left SVD
/// sweep using the same relative rule as mps_from_dense. Output normalized.
MpsState compress(const MpsState& state, double tol = 0.0);

}  // namespace mpstomo
