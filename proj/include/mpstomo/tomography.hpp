#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mpstomo/dense_state.hpp"
#include "mpstomo/density_matrix.hpp"
#include "mpstomo/extracted_tensors.hpp"
#include "mpstomo/mps_state.hpp"

namespace mpstomo {

enum class NoiseMode { Exact, SubspacePerturbation, Shots };

std::string_view to_string(NoiseMode mode);
NoiseMode parse_noise_mode(std::string_view name);

/// How each window's density matrix is "measured".
///
/// subspace_perturbation conjugates the exact matrix by exp(i eps H) with H a
/// seeded random Hermitian of unit spectral norm, so the estimated support is
/// rotated by at most eps. shots draws `shots` samples in each of the 3^k
/// Pauli bases (qubits only) and inverts the frequencies.
struct NoiseConfig {
  NoiseMode mode = NoiseMode::Exact;
  double epsilon = 0.0;
  std::int64_t shots = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Choice of disentangler on the last step, where the window holds the whole
/// remaining (pure) state. `Eigen` uses the eigenbasis like every other step,
/// which leaves eta = |0..0> up to phase. `Schmidt` maps the window's Schmidt
/// pairs u_s (x) v_s to |0> (x) v_s, so eta keeps the last k-1 sites in their
/// incoming basis (e.g. a|0> + e^{i phi} b|1> for GHZ).
enum class BoundaryGauge { Schmidt, Eigen };

struct ProtocolConfig {
  int chi = 1;
  /// Window length; defaults to ceil(log_d chi) + 1.
  std::optional<int> k;
  NoiseConfig noise;
  double truncation_abort_threshold = 0.5;
  BoundaryGauge boundary_gauge = BoundaryGauge::Schmidt;
  /// Largest bond the MPS backend may create before raising BondOverflow.
  Eigen::Index bond_cap = 4096;
  /// When set, every disentangler is multiplied by random unitaries acting
  /// within its a=0 and a!=0 blocks. Used to check gauge independence.
  std::optional<std::uint64_t> gauge_seed;

  /// Validated window length for local dimension d on n sites.
  int resolved_k(int d, int n) const;
};

/// ceil(log_d chi) + 1.
int default_window(int d, int chi);

struct Disentangler {
  int step = 0;
  Matrix matrix;
  /// Spectrum (descending) of the estimated density matrix it was built from.
  Eigen::VectorXd eigenvalues;
};

struct TruncationRecord {
  int step = 0;
  double probability = 1.0;
  double truncation_error = 0.0;
  /// Estimated eigenvalue mass beyond the leading d^(k-1) eigenvalues.
  double residual_mass = 0.0;
};

struct TruncationLog {
  int expected_steps = 0;
  std::vector<TruncationRecord> records;

  double total_error() const;
};

struct TomographyResult {
  int n = 0;
  int d = 2;
  int k = 1;
  ProtocolConfig config;
  std::vector<Disentangler> disentanglers;
  Vector eta;
  TruncationLog log;
  std::int64_t windows = 0;
  std::int64_t settings_per_window = 0;
  std::optional<ExtractedTensors> tensors;

  std::int64_t measurement_settings() const { return windows * settings_per_window; }
};

/// Measurement bases per window: (d+1)^k, i.e. the 3^k Pauli settings for qubits.
std::int64_t settings_per_window(int d, int k);

/// Applies the configured measurement model to an exact window matrix. The
/// `stream` index (the protocol step) selects an independent random stream.
DensityMatrix apply_measurement_noise(const DensityMatrix& exact, int d, int k,
                                      const NoiseConfig& noise, std::uint64_t stream);

DensityMatrix estimate_rdm(const DenseState& state, int first, int k, const NoiseConfig& noise);

/// Rows (a, j) with a = 0 receive the eigenvectors of rho in descending
/// eigenvalue order; remaining rows complete an orthonormal basis.
Disentangler build_disentangler(const DensityMatrix& rho, int d, int k);

/// Schmidt-gauge variant for the final step (see BoundaryGauge).
Disentangler build_boundary_disentangler(const DensityMatrix& rho, int d, int k);

TomographyResult run_protocol(const DenseState& state, const ProtocolConfig& config);

/// Same loop on an MPS: the tail stays right-canonical, so each window
/// density matrix is a local contraction, and the disentangled window is
/// re-split into sites with SVDs.
TomographyResult run_protocol_mps(const MpsState& state, const ProtocolConfig& config);

}  // namespace mpstomo
