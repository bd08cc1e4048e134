#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mpstomo/error.hpp"
#include "mpstomo/mps_core.hpp"
#include "mpstomo/reconstruction.hpp"
#include "mpstomo/state_factory.hpp"
#include "mpstomo/tomography.hpp"
#include "oracles.hpp"

namespace mpstomo {
namespace {

ProtocolConfig config_for(int chi) {
  ProtocolConfig config;
  config.chi = chi;
  return config;
}

ExtractedTensors reconstruct(const DenseState& psi, int chi) {
  return extract_tensors(run_protocol(psi, config_for(chi)));
}

Vector amplitudes_of(const ExtractedTensors& tensors) {
  const std::int64_t dim = oracle::power(tensors.d, tensors.n);
  Vector out(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    const std::vector<int> digits = oracle::digits_of(i, tensors.d, tensors.n);
    out(i) = amplitude(tensors, digits);
  }
  return out;
}

Matrix ket_bra(int d, int row, int col) {
  Matrix m = Matrix::Zero(d, d);
  m(row, col) = 1.0;
  return m;
}

TEST(ExtractT, SingleBondSite) {
  const auto t = extract_T(2, 2);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0][0], ket_bra(2, 0, 0));
  EXPECT_EQ(t[0][1], ket_bra(2, 0, 1));
  Eigen::FullPivLU<Matrix> lu(t[0][0] + t[0][1]);
  EXPECT_EQ(lu.rank(), 1);
  EXPECT_TRUE(extract_T(1, 2).empty());
}

TEST(ExtractT, KroneckerOracle) {
  for (int d : {2, 3}) {
    for (int k : {2, 3, 4}) {
      const auto t = extract_T(k, d);
      ASSERT_EQ(static_cast<int>(t.size()), k - 1);
      for (int i = 0; i < k - 1; ++i) {
        Matrix sum = Matrix::Zero(ipow(d, k - 1), ipow(d, k - 1));
        for (int z = 0; z < d; ++z) {
          Matrix expected = Matrix::Identity(1, 1);
          for (int s = 0; s < k - 1; ++s) {
            expected = oracle::kron(expected, s == i ? ket_bra(d, 0, z) : Matrix(Matrix::Identity(d, d)));
          }
          EXPECT_EQ(t[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)], expected);
          sum += expected.adjoint() * expected;
        }
        EXPECT_LT((sum - Matrix::Identity(sum.rows(), sum.cols())).norm(), 1e-12);
      }
    }
  }
}

TEST(ExtractV, IdentityDisentangler) {
  const SiteTensor v = extract_V(Matrix::Identity(4, 4), 2, 2);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], ket_bra(2, 0, 0));
  EXPECT_EQ(v[1], ket_bra(2, 0, 1));
}

TEST(ExtractV, SlicingOracleAndIsometry) {
  Rng rng(12);
  for (int d : {2, 3}) {
    for (int k : {1, 2, 3}) {
      const Eigen::Index dim = ipow(d, k);
      const Eigen::Index bond = ipow(d, k - 1);
      const Matrix u = haar_unitary(dim, rng);
      const Matrix inv = u.adjoint();
      const SiteTensor v = extract_V(u, d, k);
      ASSERT_EQ(static_cast<int>(v.size()), d);
      Matrix sum = Matrix::Zero(bond, bond);
      for (int z = 0; z < d; ++z) {
        for (Eigen::Index r = 0; r < bond; ++r) {
          for (Eigen::Index c = 0; c < bond; ++c) {
            // <r, z| U^-1 |0, c>: site order (bond sites..., last) on the bra,
            // (first, bond sites...) on the ket
            std::vector<int> bra = oracle::digits_of(r, d, k - 1);
            bra.push_back(z);
            std::vector<int> ket{0};
            for (int digit : oracle::digits_of(c, d, k - 1)) ket.push_back(digit);
            EXPECT_EQ(v[static_cast<std::size_t>(z)](r, c), inv(oracle::index_of(bra, d), oracle::index_of(ket, d)));
          }
        }
        sum += v[static_cast<std::size_t>(z)].adjoint() * v[static_cast<std::size_t>(z)];
      }
      EXPECT_LT((sum - Matrix::Identity(bond, bond)).norm(), 1e-10);
    }
  }
}

TEST(ExtractV, RejectsNonUnitary) {
  Matrix m = Matrix::Identity(4, 4);
  m(0, 0) = 2.0;
  try {
    extract_V(m, 2, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotUnitary);
  }
}

TEST(Amplitude, ProductAndGhzValues) {
  const ExtractedTensors zero = reconstruct(build(StateSpec::product("000000")), 1);
  EXPECT_NEAR(std::abs(amplitude(zero, "000000")), 1.0, 1e-10);
  EXPECT_NEAR(std::abs(amplitude(zero, "000100")), 0.0, 1e-10);

  const ExtractedTensors ghz = reconstruct(build(StateSpec::ghz(4, 0.6, 0.8, 0.9)), 2);
  EXPECT_NEAR(std::abs(amplitude(ghz, "0000")), 0.6, 1e-10);
  EXPECT_NEAR(std::abs(amplitude(ghz, "1111")), 0.8, 1e-10);
  EXPECT_NEAR(std::abs(amplitude(ghz, "0011")), 0.0, 1e-10);
  // relative phase is physical
  const Complex ratio = amplitude(ghz, "1111") / amplitude(ghz, "0000");
  EXPECT_NEAR(std::arg(ratio), 0.9, 1e-10);
}

TEST(Amplitude, BadDigitStrings) {
  const ExtractedTensors ghz = reconstruct(build(StateSpec::ghz(4)), 2);
  for (const char* bad : {"000", "00000", "0021", "00a0"}) {
    try {
      amplitude(ghz, bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::BadDigitString);
    }
  }
  const std::vector<int> negative{0, -1, 0, 0};
  EXPECT_THROW(amplitude(ghz, negative), Error);
}

TEST(Amplitude, OracleEquivalenceOverSmallChains) {
  for (int n = 2; n <= 8; ++n) {
    for (int chi = 1; chi <= 4; ++chi) {
      if (default_window(2, chi) > n) continue;
      const DenseState psi = build(StateSpec::random_mps(n, chi, static_cast<std::uint64_t>(10 * n + chi)));
      const ExtractedTensors t = reconstruct(psi, chi);
      const Vector amps = amplitudes_of(t);
      EXPECT_LE(oracle::aligned_max_error(psi.amplitudes(), amps), 1e-8) << "n=" << n << " chi=" << chi;
      EXPECT_NEAR(amps.squaredNorm(), 1.0, 1e-8);
    }
  }
}

TEST(Amplitude, QutritOracleEquivalence) {
  const DenseState psi = build(StateSpec::random_mps(5, 3, 2, 3));
  const ExtractedTensors t = reconstruct(psi, 3);
  EXPECT_EQ(t.k, 2);
  EXPECT_LE(oracle::aligned_max_error(psi.amplitudes(), amplitudes_of(t)), 1e-8);
}

TEST(Amplitude, AgreesWithInverseUnitaryProduct) {
  // |psi> = U_1^-1 ... U_m^-1 |0...0>|eta>, U_1^-1 applied last
  const DenseState psi = build(StateSpec::random_mps(7, 3, 4));
  const TomographyResult r = run_protocol(psi, config_for(3));
  Vector v = Vector::Zero(psi.dim());
  v.head(r.eta.size()) = r.eta;
  for (auto it = r.disentanglers.rbegin(); it != r.disentanglers.rend(); ++it) {
    v = oracle::embed(it->matrix.adjoint(), 7, 2, it->step) * v;
  }
  const Vector amps = amplitudes_of(extract_tensors(r));
  EXPECT_LT((v - amps).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ToMps, ContractionEquivalentToAmplitude) {
  const DenseState psi = build(StateSpec::random_mps(8, 2, 6));
  const ExtractedTensors t = reconstruct(psi, 2);
  const DenseState dense = dense_from_mps(to_mps(t));
  EXPECT_LT((dense.amplitudes() - amplitudes_of(t)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ToMps, BondBoundsAndRecompression) {
  const ExtractedTensors two = reconstruct(build(StateSpec::random_mps(8, 2, 1)), 2);
  for (Eigen::Index b : to_mps(two).bond_dimensions()) EXPECT_LE(b, 2);

  const ExtractedTensors product = reconstruct(build(StateSpec::product("01101")), 1);
  for (Eigen::Index b : to_mps(product, 1e-10).bond_dimensions()) EXPECT_EQ(b, 1);

  const DenseState psi = build(StateSpec::random_mps(8, 3, 2));
  const ExtractedTensors three = reconstruct(psi, 3);
  ASSERT_EQ(three.k, 3);
  const MpsState raw = to_mps(three);
  EXPECT_LE(raw.max_bond(), 4);
  EXPECT_EQ(raw.max_bond(), 4);
  const MpsState compressed = to_mps(three, 1e-10);
  EXPECT_LE(compressed.max_bond(), 3);
  EXPECT_GE(fidelity(psi, compressed), 1.0 - 1e-9);
}

TEST(Fidelity, Examples) {
  const DenseState psi = build(StateSpec::random_mps(8, 2, 9));
  EXPECT_NEAR(fidelity(psi, psi), 1.0, 1e-14);
  EXPECT_NEAR(fidelity(build(StateSpec::ghz(5, 0.0)), build(StateSpec::ghz(5, std::numbers::pi))), 0.0, 1e-14);
  const MpsState rec = to_mps(reconstruct(psi, 2));
  EXPECT_GE(fidelity(psi, rec), 1.0 - 1e-9);
  EXPECT_NEAR(fidelity(rec, psi), fidelity(psi, rec), 1e-14);
  EXPECT_NEAR(fidelity(rec, build_mps(StateSpec::random_mps(8, 2, 9))), fidelity(psi, rec), 1e-12);
  EXPECT_NEAR(fidelity(psi, dense_from_mps(rec)), fidelity(psi, rec), 1e-12);
  try {
    fidelity(psi, build(StateSpec::ghz(4)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(Fidelity, PhaseAlignedDistance) {
  const DenseState psi = build(StateSpec::random_mps(6, 2, 1));
  Vector rotated = psi.amplitudes() * std::polar(1.0, 0.7);
  EXPECT_LT(phase_aligned_distance(psi, DenseState(6, 2, rotated)), 1e-14);
  const DenseState other = build(StateSpec::random_mps(6, 2, 2));
  const double f = fidelity(psi, other);
  EXPECT_NEAR(phase_aligned_distance(psi, other), std::sqrt(2.0 - 2.0 * f), 1e-10);
}

}  // namespace
}  // namespace mpstomo
