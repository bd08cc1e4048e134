#include "mpstomo/tomography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "mpstomo/error.hpp"
#include "mpstomo/mps_core.hpp"

namespace mpstomo {
namespace {

constexpr double kMinProbability = 1e-14;

// Basis rotations taking the +1 eigenvector of X, Y, Z to |0>.
std::array<Matrix, 3> pauli_basis_changes() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix hx(2, 2);
  hx << s, s, s, -s;
  Matrix sdg = Matrix::Identity(2, 2);
  sdg(1, 1) = Complex(0.0, -1.0);
  return {hx, hx * sdg, Matrix::Identity(2, 2)};
}

std::array<Matrix, 4> pauli_matrices() {
  Matrix i2 = Matrix::Identity(2, 2);
  Matrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  z << 1, 0, 0, -1;
  return {i2, x, y, z};
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Multinomial draw by sequential conditional binomials.
std::vector<std::int64_t> sample_counts(const Eigen::VectorXd& probabilities, std::int64_t shots,
                                        Rng& rng) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(probabilities.size()), 0);
  std::int64_t remaining = shots;
  double mass = 1.0;
  for (Eigen::Index o = 0; o < probabilities.size() && remaining > 0; ++o) {
    if (o + 1 == probabilities.size()) {
      counts[static_cast<std::size_t>(o)] = remaining;
      break;
    }
    const double p = mass > 0.0 ? std::clamp(probabilities(o) / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> draw(remaining, p);
    const std::int64_t c = draw(rng);
    counts[static_cast<std::size_t>(o)] = c;
    remaining -= c;
    mass -= probabilities(o);
  }
  return counts;
}

// Linear-inversion Pauli tomography of a k-qubit window.
Matrix shot_estimate(const Matrix& rho, int k, std::int64_t shots, Rng& rng) {
  const auto changes = pauli_basis_changes();
  const auto paulis = pauli_matrices();
  const std::int64_t dim = ipow(2, k);
  const std::int64_t n_settings = ipow(3, k);
  const std::int64_t n_words = ipow(4, k);

  // expectation sums and compatible-setting counts per Pauli word
  std::vector<double> sums(static_cast<std::size_t>(n_words), 0.0);
  std::vector<std::int64_t> hits(static_cast<std::size_t>(n_words), 0);

  std::vector<int> setting(static_cast<std::size_t>(k));
  std::vector<int> word(static_cast<std::size_t>(k));
  for (std::int64_t s = 0; s < n_settings; ++s) {
    std::int64_t rest = s;
    for (int q = k - 1; q >= 0; --q) {
      setting[static_cast<std::size_t>(q)] = static_cast<int>(rest % 3);
      rest /= 3;
    }
    Matrix rotation = changes[static_cast<std::size_t>(setting[0])];
    for (int q = 1; q < k; ++q) rotation = kron(rotation, changes[static_cast<std::size_t>(setting[static_cast<std::size_t>(q)])]);
    const Eigen::VectorXd probs = (rotation * rho * rotation.adjoint()).diagonal().real().cwiseMax(0.0);
    const std::vector<std::int64_t> counts = sample_counts(probs / probs.sum(), shots, rng);

    // Words compatible with this setting: each qubit either I or the setting's Pauli.
    for (std::int64_t mask = 0; mask < (std::int64_t{1} << k); ++mask) {
      std::int64_t word_index = 0;
      for (int q = 0; q < k; ++q) {
        const bool active = (mask >> (k - 1 - q)) & 1;
        word_index = word_index * 4 + (active ? setting[static_cast<std::size_t>(q)] + 1 : 0);
      }
      double value = 0.0;
      for (std::int64_t o = 0; o < dim; ++o) {
        // Parity of outcome bits on the active qubits.
        const int parity = __builtin_popcountll(static_cast<unsigned long long>(o & mask)) & 1;
        value += (parity ? -1.0 : 1.0) * static_cast<double>(counts[static_cast<std::size_t>(o)]);
      }
      sums[static_cast<std::size_t>(word_index)] += value / static_cast<double>(shots);
      hits[static_cast<std::size_t>(word_index)] += 1;
    }
  }

  Matrix estimate = Matrix::Zero(dim, dim);
  for (std::int64_t w = 0; w < n_words; ++w) {
    std::int64_t rest = w;
    for (int q = k - 1; q >= 0; --q) {
      word[static_cast<std::size_t>(q)] = static_cast<int>(rest % 4);
      rest /= 4;
    }
    Matrix op = paulis[static_cast<std::size_t>(word[0])];
    for (int q = 1; q < k; ++q) op = kron(op, paulis[static_cast<std::size_t>(word[static_cast<std::size_t>(q)])]);
    const double expectation = sums[static_cast<std::size_t>(w)] / static_cast<double>(hits[static_cast<std::size_t>(w)]);
    estimate += expectation * op;
  }
  return estimate / static_cast<double>(dim);
}

double residual_mass(const Eigen::VectorXd& descending, Eigen::Index keep) {
  double mass = 0.0;
  for (Eigen::Index j = keep; j < descending.size(); ++j) mass += std::max(0.0, descending(j));
  return mass;
}

void scramble_gauge(Disentangler& dis, int d, int k, std::uint64_t seed) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(dis.step)));
  const Eigen::Index block = ipow(d, k - 1);
  const Eigen::Index dim = dis.matrix.rows();
  Matrix g = Matrix::Zero(dim, dim);
  g.topLeftCorner(block, block) = haar_unitary(block, rng);
  if (dim > block) g.bottomRightCorner(dim - block, dim - block) = haar_unitary(dim - block, rng);
  dis.matrix = g * dis.matrix;
}

// Shared per-step logic: estimate, build, optionally scramble.
Disentangler make_step_disentangler(const DensityMatrix& exact, int d, int k, int step,
                                    bool final_step, const ProtocolConfig& config) {
  const DensityMatrix estimate =
      apply_measurement_noise(exact, d, k, config.noise, static_cast<std::uint64_t>(step));
  Disentangler dis = (final_step && config.boundary_gauge == BoundaryGauge::Schmidt)
                         ? build_boundary_disentangler(estimate, d, k)
                         : build_disentangler(estimate, d, k);
  dis.step = step;
  if (config.gauge_seed) scramble_gauge(dis, d, k, *config.gauge_seed);
  return dis;
}

TruncationRecord check_step(const Disentangler& dis, double probability, Eigen::Index keep,
                            const ProtocolConfig& config) {
  TruncationRecord record;
  record.step = dis.step;
  record.probability = std::clamp(probability, 0.0, 1.0);
  record.truncation_error = 1.0 - record.probability;
  record.residual_mass = residual_mass(dis.eigenvalues, keep);
  if (record.truncation_error > config.truncation_abort_threshold) {
    throw Error(ErrorKind::TruncationAbort,
                "step " + std::to_string(dis.step) + " lost " +
                    std::to_string(record.truncation_error) + " of the state");
  }
  return record;
}

TomographyResult prepare_result(int n, int d, const ProtocolConfig& config) {
  config.noise.validate();
  TomographyResult result;
  result.n = n;
  result.d = d;
  result.k = config.resolved_k(d, n);
  result.config = config;
  result.windows = n - result.k + 1;
  result.settings_per_window = settings_per_window(d, result.k);
  result.log.expected_steps = static_cast<int>(result.windows);
  if (config.noise.mode == NoiseMode::Shots && d != 2) {
    throw Error(ErrorKind::ShotsUnsupported, "shot sampling is implemented for qubits only");
  }
  return result;
}

}  // namespace

std::string_view to_string(NoiseMode mode) {
  switch (mode) {
    case NoiseMode::Exact: return "exact";
    case NoiseMode::SubspacePerturbation: return "perturb";
    case NoiseMode::Shots: return "shots";
  }
  return "unknown";
}

NoiseMode parse_noise_mode(std::string_view name) {
  if (name == "exact") return NoiseMode::Exact;
  if (name == "perturb" || name == "subspace_perturbation") return NoiseMode::SubspacePerturbation;
  if (name == "shots") return NoiseMode::Shots;
  throw Error(ErrorKind::ConfigError, "unknown noise mode '" + std::string(name) + "'");
}

void NoiseConfig::validate() const {
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::ConfigError, "noise.epsilon must be >= 0");
  if (shots < 1) throw Error(ErrorKind::ConfigError, "noise.shots must be >= 1");
}

int default_window(int d, int chi) { return ceil_log(d, chi) + 1; }

int ProtocolConfig::resolved_k(int d, int n) const {
  if (chi < 1) throw Error(ErrorKind::ConfigError, "chi must be >= 1");
  const int window = k.value_or(default_window(d, chi));
  if (window < 1) throw Error(ErrorKind::ConfigError, "k must be >= 1");
  if (ipow(d, window - 1) < chi) {
    throw Error(ErrorKind::ConfigError, "k too small: need d^(k-1) >= chi");
  }
  if (window > n) {
    throw Error(ErrorKind::ConfigError, "window k=" + std::to_string(window) +
                                            " longer than the chain (n=" + std::to_string(n) + ")");
  }
  if (!(truncation_abort_threshold >= 0.0 && truncation_abort_threshold <= 1.0)) {
    throw Error(ErrorKind::ConfigError, "truncation_abort_threshold must lie in [0, 1]");
  }
  return window;
}

double TruncationLog::total_error() const {
  double total = 0.0;
  for (const TruncationRecord& r : records) total += r.truncation_error;
  return total;
}

std::int64_t settings_per_window(int d, int k) { return ipow(d + 1, k); }

DensityMatrix apply_measurement_noise(const DensityMatrix& exact, int d, int k,
                                      const NoiseConfig& noise, std::uint64_t stream) {
  switch (noise.mode) {
    case NoiseMode::Exact:
      return exact;
    case NoiseMode::SubspacePerturbation: {
      if (noise.epsilon == 0.0) return exact;
      Rng rng(derive_seed(noise.seed, stream));
      const Matrix rotation = hermitian_exp_i(random_hermitian_unit(exact.dim(), rng), noise.epsilon);
      return DensityMatrix::repaired(rotation * exact.entries() * rotation.adjoint());
    }
    case NoiseMode::Shots: {
      if (d != 2) throw Error(ErrorKind::ShotsUnsupported, "shot sampling needs d = 2");
      Rng rng(derive_seed(noise.seed, stream));
      return DensityMatrix::repaired(shot_estimate(exact.entries(), k, noise.shots, rng));
    }
  }
  return exact;
}

DensityMatrix estimate_rdm(const DenseState& state, int first, int k, const NoiseConfig& noise) {
  noise.validate();
  if (noise.mode == NoiseMode::Shots && state.d() != 2) {
    throw Error(ErrorKind::ShotsUnsupported, "shot sampling needs d = 2");
  }
  return apply_measurement_noise(reduced_density_matrix(state, first, k), state.d(), k, noise,
                                 static_cast<std::uint64_t>(first));
}

Disentangler build_disentangler(const DensityMatrix& rho, int d, int k) {
  if (rho.dim() != ipow(d, k)) {
    throw Error(ErrorKind::NotADensityMatrix, "density matrix is not d^k dimensional");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(rho.entries());
  const Eigen::VectorXd lambda = eig.eigenvalues().reverse();
  const Matrix vectors = eig.eigenvectors().rowwise().reverse();
  const double cutoff = kRankTolerance * std::max(lambda(0), 0.0);
  Eigen::Index rank = 0;
  while (rank < lambda.size() && lambda(rank) > cutoff) ++rank;

  Matrix support = vectors.leftCols(rank);
  for (Eigen::Index j = 0; j < rank; ++j) fix_phase(support.col(j));
  const Matrix basis = orthonormal_completion(support);

  Disentangler dis;
  dis.matrix = basis.adjoint();
  dis.eigenvalues = lambda;
  return dis;
}

Disentangler build_boundary_disentangler(const DensityMatrix& rho, int d, int k) {
  if (rho.dim() != ipow(d, k)) {
    throw Error(ErrorKind::NotADensityMatrix, "density matrix is not d^k dimensional");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(rho.entries());
  const Eigen::VectorXd lambda = eig.eigenvalues().reverse();
  Vector top = eig.eigenvectors().col(rho.dim() - 1);
  fix_phase(top);

  const Eigen::Index tail = ipow(d, k - 1);
  const Matrix split = Eigen::Map<const RowMajorMatrix>(top.data(), d, tail);
  Eigen::JacobiSVD<Matrix> svd(split, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > kSingularFloor * sigma(0)) ++rank;

  // top = sum_s sigma_s u_s (x) v_s with v_s = conj(V column s).
  Matrix inputs(rho.dim(), rank);
  Matrix outputs(rho.dim(), rank);
  for (Eigen::Index s = 0; s < rank; ++s) {
    Vector u = svd.matrixU().col(s);
    Vector v = svd.matrixV().col(s).conjugate();
    const Vector u_before = u;
    fix_phase(u);
    // keep u (x) v fixed: v absorbs the inverse of the phase put on u
    const Complex shift = u_before.dot(u);
    v *= std::conj(shift);
    Vector in(rho.dim());
    for (Eigen::Index a = 0; a < d; ++a) in.segment(a * tail, tail) = u(a) * v;
    inputs.col(s) = in;
    outputs.col(s) = Vector::Zero(rho.dim());
    outputs.col(s).head(tail) = v;
  }
  const Matrix x = orthonormal_completion(inputs);
  const Matrix y = orthonormal_completion(outputs);

  Disentangler dis;
  dis.matrix = y * x.adjoint();
  dis.eigenvalues = lambda;
  return dis;
}

TomographyResult run_protocol(const DenseState& state, const ProtocolConfig& config) {
  TomographyResult result = prepare_result(state.n(), state.d(), config);
  const int d = state.d();
  const int k = result.k;
  const int steps = static_cast<int>(result.windows);
  const Eigen::Index keep = ipow(d, k - 1);

  DenseState current = state;
  for (int step = 0; step < steps; ++step) {
    const DensityMatrix exact = reduced_density_matrix(current, step, k);
    Disentangler dis = make_step_disentangler(exact, d, k, step, step + 1 == steps, config);
    const DenseState rotated = apply_window_unitary(current, dis.matrix, step);
    Postselection post = postselect_zero(rotated, step);
    result.log.records.push_back(check_step(dis, post.probability, keep, config));
    result.disentanglers.push_back(std::move(dis));
    current = std::move(post.state);
  }
  // Every site before the last k-1 is now |0>, so eta is the leading block.
  result.eta = current.amplitudes().head(keep);
  result.eta.normalize();
  return result;
}

TomographyResult run_protocol_mps(const MpsState& state, const ProtocolConfig& config) {
  TomographyResult result = prepare_result(state.n(), state.d(), config);
  const int d = state.d();
  const int k = result.k;
  const int steps = static_cast<int>(result.windows);
  const Eigen::Index keep = ipow(d, k - 1);
  // Working chain: `left` is the bond vector carried in from the disentangled
  // prefix, sites[offset..] are right-canonical with a trivial right boundary.
  const MpsState canonical = right_canonicalize(state);
  std::vector<SiteTensor> sites = canonical.sites();
  RowMajorMatrix left = RowMajorMatrix::Ones(1, 1);
  std::size_t offset = 0;

  for (int step = 0; step < steps; ++step) {
    RowMajorMatrix block = left;
    for (int s = 0; s < k; ++s) {
      const SiteTensor& site = sites[offset + static_cast<std::size_t>(s)];
      RowMajorMatrix next(block.rows() * d, site.front().cols());
      for (Eigen::Index r = 0; r < block.rows(); ++r) {
        for (int z = 0; z < d; ++z) next.row(r * d + z) = block.row(r) * site[static_cast<std::size_t>(z)];
      }
      block = std::move(next);
    }
    const double total = block.squaredNorm();
    Matrix rho = block * block.adjoint() / total;
    rho = 0.5 * (rho + rho.adjoint());
    const DensityMatrix exact(std::move(rho));

    Disentangler dis = make_step_disentangler(exact, d, k, step, step + 1 == steps, config);
    const RowMajorMatrix rotated = dis.matrix * block;
    RowMajorMatrix kept = rotated.topRows(keep);
    const double kept_mass = kept.squaredNorm();
    const double probability = kept_mass / total;
    if (probability < kMinProbability) {
      throw Error(ErrorKind::ZeroProbability,
                  "outcome 0 on site " + std::to_string(step) + " has probability " +
                      std::to_string(probability));
    }
    result.log.records.push_back(check_step(dis, probability, keep, config));
    result.disentanglers.push_back(std::move(dis));
    kept /= std::sqrt(kept_mass);

    // Re-split the surviving k-1 sites right to left so they stay right-canonical.
    std::vector<Complex> buffer(kept.data(), kept.data() + kept.size());
    Eigen::Index chi = kept.cols();
    for (int t = k - 1; t >= 1; --t) {
      const Eigen::Index rows = ipow(d, t - 1);
      const Matrix m = Eigen::Map<const RowMajorMatrix>(buffer.data(), rows, d * chi);
      Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::VectorXd& sigma = svd.singularValues();
      Eigen::Index r = 0;
      while (r < sigma.size() && sigma(r) > kSingularFloor * sigma(0)) ++r;
      r = std::max<Eigen::Index>(r, 1);
      if (r > config.bond_cap) {
        throw Error(ErrorKind::BondOverflow, "bond " + std::to_string(r) + " exceeds cap " +
                                                 std::to_string(config.bond_cap));
      }
      const Matrix vh = svd.matrixV().leftCols(r).adjoint();
      SiteTensor site(static_cast<std::size_t>(d));
      for (int z = 0; z < d; ++z) site[static_cast<std::size_t>(z)] = vh.middleCols(z * chi, chi);
      sites[offset + static_cast<std::size_t>(t)] = std::move(site);
      const RowMajorMatrix carry = svd.matrixU().leftCols(r) * sigma.head(r).cast<Complex>().asDiagonal();
      buffer.assign(carry.data(), carry.data() + carry.size());
      chi = r;
    }
    left = Eigen::Map<const RowMajorMatrix>(buffer.data(), 1, chi);
    ++offset;
  }

  RowMajorMatrix tail = left;
  for (std::size_t s = offset; s < sites.size(); ++s) {
    RowMajorMatrix next(tail.rows() * d, sites[s].front().cols());
    for (Eigen::Index r = 0; r < tail.rows(); ++r) {
      for (int z = 0; z < d; ++z) next.row(r * d + z) = tail.row(r) * sites[s][static_cast<std::size_t>(z)];
    }
    tail = std::move(next);
  }
  result.eta = Eigen::Map<const Vector>(tail.data(), tail.size());
  result.eta.normalize();
  return result;
}

}  // namespace mpstomo
