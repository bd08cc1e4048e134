#include "mpstomo/mps_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpstomo/error.hpp"

namespace mpstomo {
namespace {

void check_same_shape(int n_a, int d_a, int n_b, int d_b) {
  if (n_a != n_b || d_a != d_b) {
    throw Error(ErrorKind::ShapeMismatch, "states differ in site count or local dimension");
  }
}

void check_window(int n, int first, int k) {
  if (first < 0 || k < 1 || first + k > n) {
    throw Error(ErrorKind::WindowOutOfRange, "window [" + std::to_string(first) + ", " +
                                                 std::to_string(first + k) + ") on " +
                                                 std::to_string(n) + " sites");
  }
}

Eigen::Index kept_rank(const Eigen::VectorXd& singular, double tol) {
  if (singular.size() == 0 || singular(0) <= 0.0) return 1;
  const double cutoff = std::max(tol, kSingularFloor) * singular(0);
  Eigen::Index r = 0;
  while (r < singular.size() && singular(r) > cutoff) ++r;
  return std::max<Eigen::Index>(r, 1);
}

// Splits a row-major block whose rows are (left bond, d^sites physical) and
// whose columns are the right bond into `sites` site tensors, left to right.
// The last tensor absorbs the remainder. Row-major storage makes each reshape
// a reinterpretation of the same buffer.
std::vector<SiteTensor> split_left_to_right(RowMajorMatrix block, Eigen::Index chi_left, int d,
                                            int sites, Eigen::Index chi_right, double tol) {
  std::vector<SiteTensor> out;
  out.reserve(static_cast<std::size_t>(sites));
  Eigen::Index chi = chi_left;
  std::vector<Complex> buffer(block.data(), block.data() + block.size());
  for (int s = 0; s + 1 < sites; ++s) {
    const Eigen::Index rows = chi * d;
    const Eigen::Index cols = static_cast<Eigen::Index>(buffer.size()) / rows;
    const Matrix m = Eigen::Map<const RowMajorMatrix>(buffer.data(), rows, cols);
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index r = kept_rank(svd.singularValues(), tol);
    SiteTensor site(static_cast<std::size_t>(d), Matrix(chi, r));
    for (Eigen::Index a = 0; a < chi; ++a) {
      for (int z = 0; z < d; ++z) {
        site[static_cast<std::size_t>(z)].row(a) = svd.matrixU().row(a * d + z).head(r);
      }
    }
    out.push_back(std::move(site));
    RowMajorMatrix rem = svd.singularValues().head(r).cast<Complex>().asDiagonal() *
                         svd.matrixV().leftCols(r).adjoint();
    buffer.assign(rem.data(), rem.data() + rem.size());
    chi = r;
  }
  const Eigen::Map<const RowMajorMatrix> last(buffer.data(), chi * d, chi_right);
  SiteTensor site(static_cast<std::size_t>(d), Matrix(chi, chi_right));
  for (Eigen::Index a = 0; a < chi; ++a) {
    for (int z = 0; z < d; ++z) site[static_cast<std::size_t>(z)].row(a) = last.row(a * d + z);
  }
  out.push_back(std::move(site));
  return out;
}

// Rows indexed by (left bond, window digits), columns by the right bond.
RowMajorMatrix contract_window(const MpsState& state, int first, int k) {
  const Eigen::Index chi_left = state.site(first).front().rows();
  RowMajorMatrix block = RowMajorMatrix::Identity(chi_left, chi_left);
  const int d = state.d();
  for (int s = first; s < first + k; ++s) {
    const SiteTensor& site = state.site(s);
    RowMajorMatrix next(block.rows() * d, site.front().cols());
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      for (int z = 0; z < d; ++z) {
        next.row(r * d + z) = block.row(r) * site[static_cast<std::size_t>(z)];
      }
    }
    block = std::move(next);
  }
  return block;
}

std::vector<SiteTensor> absorbed_sites(const MpsState& state) {
  std::vector<SiteTensor> sites = state.sites();
  for (Matrix& a : sites.front()) a = state.left() * a;
  for (Matrix& a : sites.back()) a = a * state.right();
  return sites;
}

double stacked_norm(const SiteTensor& site) {
  double sq = 0.0;
  for (const Matrix& a : site) sq += a.squaredNorm();
  return std::sqrt(sq);
}

}  // namespace

DenseState dense_from_mps(const MpsState& state) {
  const int n = state.n();
  const int d = state.d();
  if (ipow(d, n) > kDenseGuard) {
    throw Error(ErrorKind::SizeExceeded, "d^n exceeds the dense guard of 2^24");
  }
  RowMajorMatrix partial = state.left();
  for (const SiteTensor& site : state.sites()) {
    RowMajorMatrix next(partial.rows() * d, site.front().cols());
    for (Eigen::Index r = 0; r < partial.rows(); ++r) {
      for (int z = 0; z < d; ++z) {
        next.row(r * d + z) = partial.row(r) * site[static_cast<std::size_t>(z)];
      }
    }
    partial = std::move(next);
  }
  Vector amps = partial * state.right();
  return DenseState::normalized(n, d, std::move(amps));
}

MpsState mps_from_dense(const DenseState& state, double tol) {
  const RowMajorMatrix block =
      Eigen::Map<const RowMajorMatrix>(state.amplitudes().data(), state.dim(), 1);
  std::vector<SiteTensor> sites = split_left_to_right(block, 1, state.d(), state.n(), 1, tol);
  const double nrm = stacked_norm(sites.back());
  for (Matrix& a : sites.back()) a /= nrm;
  return MpsState(state.d(), std::move(sites), Gauge::LeftCanonical);
}

Complex inner_product(const DenseState& a, const DenseState& b) {
  check_same_shape(a.n(), a.d(), b.n(), b.d());
  return a.amplitudes().dot(b.amplitudes());
}

Complex inner_product(const MpsState& a, const MpsState& b) {
  check_same_shape(a.n(), a.d(), b.n(), b.d());
  Matrix env = a.left().adjoint() * b.left();
  for (int i = 0; i < a.n(); ++i) {
    const SiteTensor& sa = a.site(i);
    const SiteTensor& sb = b.site(i);
    Matrix next = Matrix::Zero(sa.front().cols(), sb.front().cols());
    for (std::size_t z = 0; z < sa.size(); ++z) next.noalias() += sa[z].adjoint() * env * sb[z];
    env = std::move(next);
  }
  return a.right().dot(env * b.right());
}

DensityMatrix reduced_density_matrix(const DenseState& state, int first, int k) {
  check_window(state.n(), first, k);
  const int d = state.d();
  const std::int64_t left = ipow(d, first);
  const std::int64_t window = ipow(d, k);
  const std::int64_t right = ipow(d, state.n() - first - k);
  Matrix rho = Matrix::Zero(window, window);
  for (std::int64_t l = 0; l < left; ++l) {
    const Eigen::Map<const RowMajorMatrix> block(state.amplitudes().data() + l * window * right,
                                                 window, right);
    rho.noalias() += block * block.adjoint();
  }
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(std::move(rho));
}

DenseState apply_window_unitary(const DenseState& state, const Matrix& u, int first) {
  const int d = state.d();
  const int k = ceil_log(d, u.rows());
  if (u.rows() != u.cols() || ipow(d, k) != u.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "window unitary is not d^k x d^k");
  }
  if (!is_unitary(u)) throw Error(ErrorKind::NotUnitary, "window operator is not unitary");
  check_window(state.n(), first, k);
  const std::int64_t left = ipow(d, first);
  const std::int64_t window = u.rows();
  const std::int64_t right = ipow(d, state.n() - first - k);
  Vector out(state.dim());
  for (std::int64_t l = 0; l < left; ++l) {
    const Eigen::Map<const RowMajorMatrix> in(state.amplitudes().data() + l * window * right,
                                              window, right);
    Eigen::Map<RowMajorMatrix>(out.data() + l * window * right, window, right).noalias() =
        u * in;
  }
  return DenseState::normalized(state.n(), d, std::move(out));
}

MpsState apply_window_unitary(const MpsState& state, const Matrix& u, int first) {
  const int d = state.d();
  const int k = ceil_log(d, u.rows());
  if (u.rows() != u.cols() || ipow(d, k) != u.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "window unitary is not d^k x d^k");
  }
  if (!is_unitary(u)) throw Error(ErrorKind::NotUnitary, "window operator is not unitary");
  check_window(state.n(), first, k);
  RowMajorMatrix block = contract_window(state, first, k);
  const Eigen::Index chi_left = state.site(first).front().rows();
  const Eigen::Index chi_right = block.cols();
  const Eigen::Index window = u.rows();
  for (Eigen::Index a = 0; a < chi_left; ++a) {
    block.middleRows(a * window, window) = (u * block.middleRows(a * window, window)).eval();
  }
  std::vector<SiteTensor> fresh = split_left_to_right(block, chi_left, d, k, chi_right, 0.0);
  std::vector<SiteTensor> sites = state.sites();
  for (int s = 0; s < k; ++s) {
    sites[static_cast<std::size_t>(first + s)] = std::move(fresh[static_cast<std::size_t>(s)]);
  }
  return MpsState(d, std::move(sites), state.left(), state.right(), Gauge::None);
}

Postselection postselect_zero(const DenseState& state, int site) {
  if (site < 0 || site >= state.n()) {
    throw Error(ErrorKind::WindowOutOfRange, "site " + std::to_string(site) + " out of range");
  }
  const int d = state.d();
  const std::int64_t stride = ipow(d, state.n() - 1 - site);
  Vector out = state.amplitudes();
  for (std::int64_t i = 0; i < out.size(); ++i) {
    if ((i / stride) % d != 0) out(i) = 0.0;
  }
  const double p = out.squaredNorm();
  if (p < 1e-14) {
    throw Error(ErrorKind::ZeroProbability,
                "outcome 0 on site " + std::to_string(site) + " has probability " +
                    std::to_string(p));
  }
  return {DenseState::normalized(state.n(), d, std::move(out)), p};
}

Eigen::VectorXd schmidt_spectrum(const DenseState& state, int cut) {
  if (cut < 1 || cut >= state.n()) {
    throw Error(ErrorKind::CutOutOfRange, "cut " + std::to_string(cut) + " on " +
                                              std::to_string(state.n()) + " sites");
  }
  const std::int64_t rows = ipow(state.d(), cut);
  const Matrix m = Eigen::Map<const RowMajorMatrix>(state.amplitudes().data(), rows,
                                                    state.dim() / rows);
  Eigen::BDCSVD<Matrix> svd(m);
  Eigen::VectorXd weights = svd.singularValues().cwiseAbs2();
  return weights / weights.sum();
}

MpsState left_canonicalize(const MpsState& state) {
  const int d = state.d();
  std::vector<SiteTensor> sites = absorbed_sites(state);
  for (std::size_t i = 0; i + 1 < sites.size(); ++i) {
    SiteTensor& site = sites[i];
    const Eigen::Index chi = site.front().rows();
    const Eigen::Index cols = site.front().cols();
    Matrix stacked(chi * d, cols);
    for (Eigen::Index a = 0; a < chi; ++a) {
      for (int z = 0; z < d; ++z) stacked.row(a * d + z) = site[static_cast<std::size_t>(z)].row(a);
    }
    Eigen::HouseholderQR<Matrix> qr(stacked);
    const Eigen::Index r = std::min(stacked.rows(), cols);
    const Matrix q = qr.householderQ() * Matrix::Identity(stacked.rows(), r);
    const Matrix upper = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    for (int z = 0; z < d; ++z) {
      Matrix& a = site[static_cast<std::size_t>(z)];
      a.resize(chi, r);
      for (Eigen::Index row = 0; row < chi; ++row) a.row(row) = q.row(row * d + z);
    }
    for (Matrix& a : sites[i + 1]) a = upper * a;
  }
  const double nrm = stacked_norm(sites.back());
  if (!(nrm > 0.0)) throw Error(ErrorKind::NotNormalized, "MPS has zero norm");
  for (Matrix& a : sites.back()) a /= nrm;
  return MpsState(d, std::move(sites), Gauge::LeftCanonical);
}

MpsState right_canonicalize(const MpsState& state) {
  const int d = state.d();
  std::vector<SiteTensor> sites = absorbed_sites(state);
  for (std::size_t i = sites.size() - 1; i >= 1; --i) {
    SiteTensor& site = sites[i];
    const Eigen::Index chi = site.front().rows();
    const Eigen::Index cols = site.front().cols();
    Matrix wide(chi, d * cols);
    for (int z = 0; z < d; ++z) wide.middleCols(z * cols, cols) = site[static_cast<std::size_t>(z)];
    const Matrix tall = wide.adjoint();
    Eigen::HouseholderQR<Matrix> qr(tall);
    const Eigen::Index r = std::min(tall.rows(), chi);
    const Matrix q = qr.householderQ() * Matrix::Identity(tall.rows(), r);
    const Matrix lower = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>().toDenseMatrix().adjoint();
    const Matrix rows = q.adjoint();
    for (int z = 0; z < d; ++z) {
      site[static_cast<std::size_t>(z)] = rows.middleCols(z * cols, cols);
    }
    for (Matrix& a : sites[i - 1]) a = a * lower;
  }
  const double nrm = stacked_norm(sites.front());
  if (!(nrm > 0.0)) throw Error(ErrorKind::NotNormalized, "MPS has zero norm");
  for (Matrix& a : sites.front()) a /= nrm;
  return MpsState(d, std::move(sites), Gauge::RightCanonical);
}

MpsState compress(const MpsState& state, double tol) {
  const int d = state.d();
  std::vector<SiteTensor> sites = left_canonicalize(state).sites();
  for (std::size_t i = sites.size() - 1; i >= 1; --i) {
    SiteTensor& site = sites[i];
    const Eigen::Index chi = site.front().rows();
    const Eigen::Index cols = site.front().cols();
    Matrix wide(chi, d * cols);
    for (int z = 0; z < d; ++z) wide.middleCols(z * cols, cols) = site[static_cast<std::size_t>(z)];
    Eigen::BDCSVD<Matrix> svd(wide, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index r = kept_rank(svd.singularValues(), tol);
    const Matrix vh = svd.matrixV().leftCols(r).adjoint();
    for (int z = 0; z < d; ++z) site[static_cast<std::size_t>(z)] = vh.middleCols(z * cols, cols);
    const Matrix carry =
        svd.matrixU().leftCols(r) * svd.singularValues().head(r).cast<Complex>().asDiagonal();
    for (Matrix& a : sites[i - 1]) a = a * carry;
  }
  const double nrm = stacked_norm(sites.front());
  for (Matrix& a : sites.front()) a /= nrm;
  return MpsState(d, std::move(sites), Gauge::RightCanonical);
}

}  // namespace mpstomo
