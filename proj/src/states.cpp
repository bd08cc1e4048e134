#include <cmath>
#include <string>

#include "mpstomo/dense_state.hpp"
#include "mpstomo/density_matrix.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/mps_state.hpp"

namespace mpstomo {

DenseState::DenseState(int n, int d, Vector amplitudes)
    : n_(n), d_(d), amplitudes_(std::move(amplitudes)) {
  if (n < 1 || d < 2) {
    throw Error(ErrorKind::InvalidSpec, "dense state needs n >= 1 and d >= 2");
  }
  if (amplitudes_.size() != ipow(d, n)) {
    throw Error(ErrorKind::ShapeMismatch,
                "amplitude vector length " + std::to_string(amplitudes_.size()) +
                    " is not d^n");
  }
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > 1e-12) {
    throw Error(ErrorKind::NotNormalized, "state norm " + std::to_string(norm));
  }
}

DenseState DenseState::normalized(int n, int d, Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) {
    throw Error(ErrorKind::NotNormalized, "cannot normalize a zero vector");
  }
  amplitudes /= norm;
  return DenseState(n, d, std::move(amplitudes));
}

DenseState DenseState::basis(int d, const std::vector<int>& digits) {
  const int n = static_cast<int>(digits.size());
  std::int64_t index = 0;
  for (int z : digits) {
    if (z < 0 || z >= d) {
      throw Error(ErrorKind::BadDigitString, "digit " + std::to_string(z) + " outside base " +
                                                 std::to_string(d));
    }
    index = index * d + z;
  }
  Vector amps = Vector::Zero(ipow(d, n));
  amps(index) = 1.0;
  return DenseState(n, d, std::move(amps));
}

MpsState::MpsState(int d, std::vector<SiteTensor> sites, RowVector left, Vector right,
                   Gauge gauge)
    : d_(d), sites_(std::move(sites)), left_(std::move(left)), right_(std::move(right)),
      gauge_(gauge) {
  if (d_ < 2) throw Error(ErrorKind::InvalidSpec, "local dimension must be >= 2");
  if (sites_.empty()) throw Error(ErrorKind::InvalidSpec, "MPS needs at least one site");
  Eigen::Index bond = left_.size();
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const SiteTensor& site = sites_[i];
    if (static_cast<int>(site.size()) != d_) {
      throw Error(ErrorKind::InconsistentBonds,
                  "site " + std::to_string(i) + " does not hold d matrices");
    }
    const Eigen::Index cols = site.front().cols();
    for (const Matrix& a : site) {
      if (a.rows() != bond || a.cols() != cols) {
        throw Error(ErrorKind::InconsistentBonds,
                    "bond mismatch entering site " + std::to_string(i));
      }
    }
    bond = cols;
  }
  if (right_.size() != bond) {
    throw Error(ErrorKind::InconsistentBonds, "right boundary does not match last bond");
  }
}

MpsState::MpsState(int d, std::vector<SiteTensor> sites, Gauge gauge)
    : MpsState(d, std::move(sites), RowVector::Ones(1), Vector::Ones(1), gauge) {}

std::vector<Eigen::Index> MpsState::bond_dimensions() const {
  std::vector<Eigen::Index> bonds;
  bonds.reserve(sites_.size() + 1);
  bonds.push_back(left_.size());
  for (const SiteTensor& site : sites_) bonds.push_back(site.front().cols());
  return bonds;
}

Eigen::Index MpsState::max_bond() const {
  Eigen::Index best = 0;
  for (Eigen::Index b : bond_dimensions()) best = std::max(best, b);
  return best;
}

double MpsState::norm() const {
  Matrix env = left_.adjoint() * left_;
  for (const SiteTensor& site : sites_) {
    Matrix next = Matrix::Zero(site.front().cols(), site.front().cols());
    for (const Matrix& a : site) next.noalias() += a.adjoint() * env * a;
    env = std::move(next);
  }
  const Complex value = right_.dot(env * right_);
  return std::sqrt(std::max(0.0, value.real()));
}

MpsState MpsState::normalized() const {
  const double nrm = norm();
  if (!(nrm > 0.0)) throw Error(ErrorKind::NotNormalized, "MPS has zero norm");
  return MpsState(d_, sites_, left_ / nrm, right_, gauge_);
}

double MpsState::left_canonical_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < sites_.size(); ++i) {
    const Eigen::Index cols = sites_[i].front().cols();
    Matrix sum = Matrix::Zero(cols, cols);
    for (const Matrix& a : sites_[i]) sum.noalias() += a.adjoint() * a;
    worst = std::max(worst, (sum - Matrix::Identity(cols, cols)).cwiseAbs().maxCoeff());
  }
  return worst;
}

double MpsState::right_canonical_defect() const {
  double worst = 0.0;
  for (std::size_t i = 1; i < sites_.size(); ++i) {
    const Eigen::Index rows = sites_[i].front().rows();
    Matrix sum = Matrix::Zero(rows, rows);
    for (const Matrix& a : sites_[i]) sum.noalias() += a * a.adjoint();
    worst = std::max(worst, (sum - Matrix::Identity(rows, rows)).cwiseAbs().maxCoeff());
  }
  return worst;
}

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw Error(ErrorKind::NotADensityMatrix, "density matrix must be square and non-empty");
  }
  const double asym = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) {
    throw Error(ErrorKind::NotADensityMatrix, "not Hermitian (deviation " +
                                                  std::to_string(asym) + ")");
  }
  const double trace = entries_.trace().real();
  if (std::abs(trace - 1.0) > 1e-10) {
    throw Error(ErrorKind::NotADensityMatrix, "trace " + std::to_string(trace));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(entries_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw Error(ErrorKind::NotADensityMatrix, "negative eigenvalue " +
                                                  std::to_string(eig.eigenvalues().minCoeff()));
  }
}

DensityMatrix DensityMatrix::repaired(const Matrix& estimate) {
  const Matrix herm = 0.5 * (estimate + estimate.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(herm);
  Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  const double total = lambda.sum();
  if (!(total > 0.0)) {
    throw Error(ErrorKind::NotADensityMatrix, "estimate has no positive spectrum");
  }
  lambda /= total;
  Matrix rho = eig.eigenvectors() * lambda.cast<Complex>().asDiagonal() *
               eig.eigenvectors().adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(std::move(rho));
}

Eigen::VectorXd DensityMatrix::spectrum() const {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(entries_, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().reverse();
}

}  // namespace mpstomo
