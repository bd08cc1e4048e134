#include "mpstomo/certification.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpstomo/error.hpp"
#include "mpstomo/mps_core.hpp"
#include "mpstomo/reconstruction.hpp"
#include "mpstomo/state_factory.hpp"

namespace mpstomo {
namespace {

Matrix support_projector(const Matrix& u, Eigen::Index block) {
  const Matrix rows = u.topRows(block);
  return rows.adjoint() * rows;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

Certificate certify(const TruncationLog& log, double threshold, const NoiseConfig& noise) {
  if (log.records.empty()) throw Error(ErrorKind::IncompleteLog, "truncation log is empty");
  if (static_cast<int>(log.records.size()) != log.expected_steps) {
    throw Error(ErrorKind::IncompleteLog, "log has " + std::to_string(log.records.size()) +
                                              " of " + std::to_string(log.expected_steps) +
                                              " steps");
  }
  Certificate cert;
  cert.threshold = threshold;
  cert.noise = noise;
  double survive = 1.0;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const TruncationRecord& r = log.records[i];
    if (r.step != static_cast<int>(i)) {
      throw Error(ErrorKind::IncompleteLog, "log entries out of order at " + std::to_string(i));
    }
    cert.step_errors.push_back(r.truncation_error);
    survive *= std::clamp(r.probability, 0.0, 1.0);
  }
  cert.cumulative_bound = std::clamp(1.0 - survive, 0.0, 1.0);
  cert.accepted = cert.cumulative_bound <= threshold;
  return cert;
}

BoundReport check_error_bound(int n, double epsilon, int trials, std::uint64_t seed, int chi) {
  if (!(epsilon >= 0.0 && epsilon <= 1e-2)) {
    throw Error(ErrorKind::ConfigError, "error-bound check needs 0 <= epsilon <= 1e-2");
  }
  if (trials < 1) throw Error(ErrorKind::ConfigError, "trials must be >= 1");

  BoundReport report;
  report.n = n;
  report.chi = chi;
  report.epsilon = epsilon;
  std::vector<double> distances;

  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
    const DenseState psi = build(StateSpec::random_mps(n, chi, trial_seed));

    ProtocolConfig exact_config;
    exact_config.chi = chi;
    exact_config.truncation_abort_threshold = 1.0;
    ProtocolConfig noisy_config = exact_config;
    noisy_config.noise.mode = NoiseMode::SubspacePerturbation;
    noisy_config.noise.epsilon = epsilon;
    noisy_config.noise.seed = derive_seed(trial_seed, 1);

    const TomographyResult exact = run_protocol(psi, exact_config);
    const TomographyResult noisy = run_protocol(psi, noisy_config);
    const DenseState recon = dense_from_mps(to_mps(extract_tensors(noisy)));

    BoundTrial trial;
    trial.seed = trial_seed;
    trial.distance = phase_aligned_distance(psi, recon);
    trial.ratio = epsilon > 0.0 ? trial.distance / (static_cast<double>(n) * n * epsilon) : 0.0;
    const Eigen::Index block = ipow(psi.d(), exact.k - 1);
    for (std::size_t s = 0; s < exact.disentanglers.size(); ++s) {
      const Matrix diff = support_projector(exact.disentanglers[s].matrix, block) -
                          support_projector(noisy.disentanglers[s].matrix, block);
      trial.deviation.push_back(operator_norm(diff));
    }
    distances.push_back(trial.distance);
    report.max_ratio = std::max(report.max_ratio, trial.ratio);
    report.trials.push_back(std::move(trial));
  }

  report.median_distance = median(distances);
  const std::size_t steps = report.trials.front().deviation.size();
  report.mean_deviation.assign(steps, 0.0);
  for (const BoundTrial& trial : report.trials) {
    for (std::size_t s = 0; s < steps; ++s) report.mean_deviation[s] += trial.deviation[s] / trials;
  }
  return report;
}

}  // namespace mpstomo
