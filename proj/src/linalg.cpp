#include "mpstomo/linalg.hpp"

#include <cmath>
#include <limits>

#include "mpstomo/error.hpp"

namespace mpstomo {

std::int64_t ipow(int base, int exponent) {
  if (base < 1 || exponent < 0) {
    throw Error(ErrorKind::InvalidSpec, "ipow needs base >= 1 and exponent >= 0");
  }
  std::int64_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (result > std::numeric_limits<std::int64_t>::max() / base) {
      throw Error(ErrorKind::SizeExceeded, "dimension overflows 64-bit index");
    }
    result *= base;
  }
  return result;
}

int ceil_log(int base, std::int64_t value) {
  int m = 0;
  std::int64_t power = 1;
  while (power < value) {
    power *= base;
    ++m;
  }
  return m;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const Matrix defect = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  return defect.cwiseAbs().maxCoeff() <= tol;
}

Vector complex_gaussian_vector(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return v;
}

Matrix complex_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

Matrix haar_unitary(Eigen::Index dim, Rng& rng) {
  const Matrix z = complex_gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

Matrix random_hermitian_unit(Eigen::Index dim, Rng& rng) {
  const Matrix a = complex_gaussian_matrix(dim, dim, rng);
  Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
  const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (scale > 0.0) h /= scale;
  return h;
}

void fix_phase(Eigen::Ref<Vector> v) {
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // Strict comparison with a small margin keeps the choice stable when two
    // entries have equal modulus up to rounding.
    const double mag = std::abs(v(i));
    if (mag > best_mag + 1e-12) {
      best_mag = mag;
      best = i;
    }
  }
  if (best_mag > 0.0) v *= std::conj(v(best)) / best_mag;
}

Matrix orthonormal_completion(const Matrix& basis) {
  const Eigen::Index dim = basis.rows();
  Matrix out(dim, dim);
  Eigen::Index filled = basis.cols();
  out.leftCols(filled) = basis;
  // Any unit vector missing from the span overlaps some e_j by >= 1/sqrt(dim),
  // so this acceptance threshold always finds a full basis.
  const double accept = 0.1 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index j = 0; j < dim && filled < dim; ++j) {
    Vector candidate = Vector::Unit(dim, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index c = 0; c < filled; ++c) {
        candidate -= out.col(c) * out.col(c).dot(candidate);
      }
    }
    const double norm = candidate.norm();
    if (norm > accept) {
      out.col(filled++) = candidate / norm;
    }
  }
  return out;
}

Matrix hermitian_exp_i(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  Vector phases(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    phases(i) = std::polar(1.0, t * lambda(i));
  }
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace mpstomo
