#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpstomo/tomography.hpp"

namespace mpstomo {

/// Evidence that the measured state is (or is not) close to a bond-chi MPS.
///
/// cumulative_bound = 1 - prod_i p_i is the probability that at least one
/// postselection in the cascade fails, an upper bound on the squared weight
/// removed by truncation.
struct Certificate {
  std::vector<double> step_errors;
  double cumulative_bound = 0.0;
  double threshold = 0.0;
  bool accepted = true;
  NoiseConfig noise;
};

/// Throws IncompleteLog if the log is empty, out of order, or shorter than
/// its expected step count.
Certificate certify(const TruncationLog& log, double threshold, const NoiseConfig& noise = {});

struct BoundTrial {
  std::uint64_t seed = 0;
  double distance = 0.0;
  /// distance / (n^2 eps); zero when eps = 0.
  double ratio = 0.0;
  /// Per step, operator-norm distance between the exact and estimated
  /// support projectors U^dagger (|0><0| (x) I) U. Gauge invariant.
  std::vector<double> deviation;
};

struct BoundReport {
  int n = 0;
  int chi = 2;
  double epsilon = 0.0;
  std::vector<BoundTrial> trials;
  double max_ratio = 0.0;
  double median_distance = 0.0;
  std::vector<double> mean_deviation;
  std::string norm = "operator";
};

/// Runs the protocol on seeded random bond-chi MPS with subspace-perturbation
/// noise of strength epsilon and measures the phase-aligned reconstruction
/// distance against the n^2 eps bound. Trial t uses derive_seed(seed, t), so
/// reports for different epsilon are paired seed by seed.
BoundReport check_error_bound(int n, double epsilon, int trials, std::uint64_t seed, int chi = 2);

}  // namespace mpstomo
