#include "mpstomo/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpstomo/error.hpp"
#include "mpstomo/mps_core.hpp"

namespace mpstomo {

std::vector<SiteTensor> extract_T(int k, int d) {
  std::vector<SiteTensor> family;
  if (k < 2) return family;
  const Eigen::Index dim = ipow(d, k - 1);
  for (int i = 0; i < k - 1; ++i) {
    const std::int64_t stride = ipow(d, k - 2 - i);
    SiteTensor ops;
    for (int z = 0; z < d; ++z) {
      // Maps basis index with digit z at position i to the same index with digit 0.
      Matrix t = Matrix::Zero(dim, dim);
      for (Eigen::Index col = 0; col < dim; ++col) {
        if ((col / stride) % d != z) continue;
        t(col - z * stride, col) = 1.0;
      }
      ops.push_back(std::move(t));
    }
    family.push_back(std::move(ops));
  }
  return family;
}

SiteTensor extract_V(const Matrix& u, int d, int k) {
  if (u.rows() != ipow(d, k) || !is_unitary(u)) {
    throw Error(ErrorKind::NotUnitary, "disentangler is not a d^k unitary");
  }
  const Eigen::Index dim = ipow(d, k - 1);
  const Matrix inverse = u.adjoint();
  SiteTensor ops;
  for (int z = 0; z < d; ++z) {
    // Row r of V^z reads row (r, z) of U^dagger; the column restriction to the
    // first dim inputs is the |0> on the window's first site.
    Matrix v(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) v.row(r) = inverse.row(r * d + z).head(dim);
    ops.push_back(std::move(v));
  }
  return ops;
}

ExtractedTensors extract_tensors(const TomographyResult& result) {
  ExtractedTensors out;
  out.n = result.n;
  out.d = result.d;
  out.k = result.k;
  out.t = extract_T(result.k, result.d);
  for (const Disentangler& dis : result.disentanglers) {
    out.v.push_back(extract_V(dis.matrix, result.d, result.k));
  }
  out.eta = result.eta;
  return out;
}

const ExtractedTensors& attach_tensors(TomographyResult& result) {
  result.tensors = extract_tensors(result);
  return *result.tensors;
}

Complex amplitude(const ExtractedTensors& tensors, std::span<const int> digits) {
  if (static_cast<int>(digits.size()) != tensors.n) {
    throw Error(ErrorKind::BadDigitString, "digit string length " + std::to_string(digits.size()) +
                                               " differs from n=" + std::to_string(tensors.n));
  }
  for (int z : digits) {
    if (z < 0 || z >= tensors.d) {
      throw Error(ErrorKind::BadDigitString, "digit " + std::to_string(z) + " outside base " +
                                                 std::to_string(tensors.d));
    }
  }
  RowVector row = RowVector::Unit(tensors.bond(), 0);
  std::size_t pos = 0;
  for (const SiteTensor& t : tensors.t) row = row * t[static_cast<std::size_t>(digits[pos++])];
  for (const SiteTensor& v : tensors.v) row = row * v[static_cast<std::size_t>(digits[pos++])];
  return row * tensors.eta;
}

Complex amplitude(const ExtractedTensors& tensors, std::string_view digits) {
  std::vector<int> parsed;
  parsed.reserve(digits.size());
  for (char c : digits) {
    if (c < '0' || c > '9') throw Error(ErrorKind::BadDigitString, "non-digit character");
    parsed.push_back(c - '0');
  }
  return amplitude(tensors, std::span<const int>(parsed));
}

MpsState to_mps(const ExtractedTensors& tensors, std::optional<double> recompress_tol) {
  std::vector<SiteTensor> sites = tensors.t;
  sites.insert(sites.end(), tensors.v.begin(), tensors.v.end());
  MpsState raw(tensors.d, std::move(sites), RowVector::Unit(tensors.bond(), 0), tensors.eta);
  if (recompress_tol) return compress(raw, *recompress_tol);
  return raw;
}

double fidelity(const DenseState& a, const DenseState& b) {
  return std::min(1.0, std::abs(inner_product(a, b)));
}

double fidelity(const MpsState& a, const MpsState& b) {
  return std::min(1.0, std::abs(inner_product(a, b)) / (a.norm() * b.norm()));
}

double fidelity(const MpsState& a, const DenseState& b) {
  return fidelity(dense_from_mps(a), b);
}

double fidelity(const DenseState& a, const MpsState& b) {
  return fidelity(a, dense_from_mps(b));
}

double phase_aligned_distance(const DenseState& a, const DenseState& b) {
  const Complex overlap = inner_product(b, a);
  const double mag = std::abs(overlap);
  const Complex phase = mag > 0.0 ? overlap / mag : Complex(1.0, 0.0);
  return (a.amplitudes() - phase * b.amplitudes()).norm();
}

}  // namespace mpstomo
