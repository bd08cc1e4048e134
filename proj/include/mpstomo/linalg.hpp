#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace mpstomo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;
using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Rng = std::mt19937_64;

// Relative eigenvalue threshold for rank decisions on density matrices.
inline constexpr double kRankTolerance = 1e-10;
// Relative singular-value floor below which a value is treated as exact zero.
inline constexpr double kSingularFloor = 1e-13;
inline constexpr double kUnitaryTolerance = 1e-10;

/// d^k as a size, throwing SizeExceeded when the result would not fit.
std::int64_t ipow(int base, int exponent);

/// Smallest m >= 0 with base^m >= value.
int ceil_log(int base, std::int64_t value);

/// Counter-based seed derivation (splitmix64 of master and index), so the
/// seed of trial i does not depend on how many trials precede it.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

bool is_unitary(const Matrix& u, double tol = kUnitaryTolerance);

Vector complex_gaussian_vector(Eigen::Index dim, Rng& rng);
Matrix complex_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
Matrix haar_unitary(Eigen::Index dim, Rng& rng);

/// GUE sample rescaled to unit spectral norm.
Matrix random_hermitian_unit(Eigen::Index dim, Rng& rng);

/// Multiplies v by the phase that makes its largest-modulus entry real positive.
void fix_phase(Eigen::Ref<Vector> v);

/// Completes the orthonormal columns of `basis` to a full unitary. Candidates
/// are canonical basis vectors taken in index order and orthonormalized
/// against everything accepted so far.
Matrix orthonormal_completion(const Matrix& basis);

/// exp(i * t * h) for Hermitian h.
Matrix hermitian_exp_i(const Matrix& h, double t);

/// Largest singular value.
double operator_norm(const Matrix& m);

}  // namespace mpstomo
