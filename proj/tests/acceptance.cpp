// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mpstomo/certification.hpp"
#include "mpstomo/mps_core.hpp"
#include "mpstomo/reconstruction.hpp"
#include "mpstomo/state_factory.hpp"
#include "mpstomo/tomography.hpp"
#include "oracles.hpp"

using namespace mpstomo;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ProtocolConfig config_for(int chi) {
  ProtocolConfig c;
  c.chi = chi;
  return c;
}

double phase_distance(double a, double b) {
  const double two_pi = 2.0 * std::numbers::pi;
  double diff = std::fmod(a - b, two_pi);
  if (diff < 0.0) diff += two_pi;
  return std::min(diff, two_pi - diff);
}

Vector all_amplitudes(const ExtractedTensors& t) {
  const std::int64_t dim = oracle::power(t.d, t.n);
  Vector out(dim);
  for (std::int64_t i = 0; i < dim; ++i) out(i) = amplitude(t, oracle::digits_of(i, t.d, t.n));
  return out;
}

// Shared by criteria 1 and 5.
struct ExactRun {
  int chi = 0;
  int k = 0;
  double fidelity = 0.0;
  double min_probability = 1.0;
  Eigen::Index max_bond = 0;
};

std::vector<ExactRun> exact_runs(double& elapsed) {
  std::vector<ExactRun> runs;
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int chi = 2 + static_cast<int>(seed % 3);
    const DenseState psi = build(StateSpec::random_mps(8, chi, 1000 + seed));
    const TomographyResult r = run_protocol(psi, config_for(chi));
    const MpsState rec = to_mps(extract_tensors(r));
    ExactRun run{chi, r.k, fidelity(psi, rec), 1.0, rec.max_bond()};
    for (const auto& rec_step : r.log.records) run.min_probability = std::min(run.min_probability, rec_step.probability);
    runs.push_back(run);
  }
  elapsed = seconds_since(start);
  return runs;
}

Outcome criterion1(const std::vector<ExactRun>& runs, double elapsed) {
  double min_f = 1.0;
  double min_p = 1.0;
  for (const ExactRun& r : runs) {
    min_f = std::min(min_f, r.fidelity);
    min_p = std::min(min_p, r.min_probability);
  }
  const bool pass = runs.size() == 50 && min_f >= 1.0 - 1e-9 && min_p >= 1.0 - 1e-10 && elapsed < 60.0;
  return {pass, fmt("50 random MPS n=8 chi in {2,3,4}: min fidelity %.15f (>= 1-1e-9), min p %.15f (>= 1-1e-10), "
                    "%.2f s (< 60 s)",
                    min_f, min_p, elapsed)};
}

Outcome criterion2() {
  double worst = 0.0;
  int cases = 0;
  for (int n = 2; n <= 8; ++n) {
    for (int chi = 1; chi <= 4; ++chi) {
      if (default_window(2, chi) > n) continue;
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const DenseState psi = build(StateSpec::random_mps(n, chi, 100 * n + 10 * chi + seed));
        const ExtractedTensors t = extract_tensors(run_protocol(psi, config_for(chi)));
        worst = std::max(worst, oracle::aligned_max_error(psi.amplitudes(), all_amplitudes(t)));
        ++cases;
      }
    }
  }
  // qutrits through the same formula
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const DenseState psi = build(StateSpec::random_mps(5, 3, seed, 3));
    const ExtractedTensors t = extract_tensors(run_protocol(psi, config_for(3)));
    worst = std::max(worst, oracle::aligned_max_error(psi.amplitudes(), all_amplitudes(t)));
    ++cases;
  }
  return {worst <= 1e-8, fmt("%d chains, n <= 8: max phase-aligned amplitude error %.3e (<= 1e-8)", cases, worst)};
}

Outcome criterion3() {
  Rng rng(2024);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double phi = angle(rng);
    const int n = 4 + trial % 5;
    const ExtractedTensors t = extract_tensors(run_protocol(build(StateSpec::ghz(n, phi)), config_for(2)));
    const Complex c0 = amplitude(t, std::string(static_cast<std::size_t>(n), '0'));
    const Complex c1 = amplitude(t, std::string(static_cast<std::size_t>(n), '1'));
    worst = std::max(worst, phase_distance(std::arg(c1 / c0), phi));
  }
  double rdm_gap = 0.0;
  for (int n = 4; n <= 8; ++n) {
    for (int first = 1; first + 2 < n; ++first) {
      const Matrix a = reduced_density_matrix(build(StateSpec::ghz(n, 0.0)), first, 2).entries();
      const Matrix b = reduced_density_matrix(build(StateSpec::ghz(n, std::numbers::pi)), first, 2).entries();
      rdm_gap = std::max(rdm_gap, (a - b).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-8 && rdm_gap <= 1e-12,
          fmt("20 hidden phases: max recovery error %.3e (<= 1e-8); interior RDM gap phi=0 vs pi %.3e (<= 1e-12)",
              worst, rdm_gap)};
}

Outcome criterion4() {
  Rng rng(77);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double min_f = 1.0;
  int trials = 0;
  for (int n : {4, 6}) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> phases(static_cast<std::size_t>(n));
      for (double& p : phases) p = angle(rng);
      const DenseState psi = build(StateSpec::w(n, phases));
      min_f = std::min(min_f, fidelity(psi, to_mps(extract_tensors(run_protocol(psi, config_for(2))))));
      ++trials;
    }
  }
  return {min_f >= 1.0 - 1e-9, fmt("%d W states n in {4,6}: min fidelity %.15f (>= 1-1e-9)", trials, min_f)};
}

Outcome criterion5(const std::vector<ExactRun>& runs) {
  int violations = 0;
  for (const ExactRun& r : runs) {
    const auto bound = ipow(2, r.k - 1);
    if (r.k != default_window(2, r.chi) || r.max_bond > bound || r.max_bond > 2 * r.chi) ++violations;
  }
  return {violations == 0 && !runs.empty(),
          fmt("%zu criterion-1 reconstructions: %d with a bond above d^(k-1) or d*chi", runs.size(), violations)};
}

Outcome criterion6() {
  int accepted = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int chi = 1 + static_cast<int>(seed % 4);
    const DenseState psi = build(StateSpec::random_mps(8, chi, 500 + seed));
    if (certify(run_protocol(psi, config_for(chi)).log, 1e-6).accepted) ++accepted;
  }
  int rejected = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ProtocolConfig c = config_for(2);
    c.truncation_abort_threshold = 1.0;
    if (!certify(run_protocol(build(StateSpec::haar_random(10, 900 + seed)), c).log, 0.1).accepted) ++rejected;
  }
  return {accepted == 50 && rejected >= 48,
          fmt("exact chi-MPS accepted at 1e-6: %d/50 (need 50); Haar n=10 rejected at 0.1 under chi=2: %d/50 "
              "(need >= 48)",
              accepted, rejected)};
}

Outcome criterion7() {
  const int n = 8;
  const BoundReport lo = check_error_bound(n, 1e-4, 20, 31);
  const BoundReport hi = check_error_bound(n, 1e-3, 20, 31);
  bool within = true;
  double worst_ratio = 0.0;
  for (const BoundReport* r : {&lo, &hi}) {
    for (const BoundTrial& t : r->trials) {
      within = within && t.distance <= n * n * r->epsilon;
      worst_ratio = std::max(worst_ratio, t.ratio);
    }
  }
  bool paired = lo.trials.size() == 20 && hi.trials.size() == 20;
  for (std::size_t i = 0; paired && i < lo.trials.size(); ++i) paired = lo.trials[i].seed == hi.trials[i].seed;
  const bool monotone = hi.median_distance >= lo.median_distance;
  return {within && paired && monotone,
          fmt("n=8, 20 paired seeds: max distance/(n^2 eps) %.3e (<= 1); median distance %.3e -> %.3e "
              "(nondecreasing)",
              worst_ratio, lo.median_distance, hi.median_distance)};
}

double best_time(const MpsState& state, const ProtocolConfig& config, int repeats) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const TomographyResult r = run_protocol_mps(state, config);
    const ExtractedTensors t = extract_tensors(r);
    best = std::min(best, seconds_since(start));
  }
  return best;
}

Outcome criterion8() {
  const ProtocolConfig c = config_for(4);
  const auto start = std::chrono::steady_clock::now();
  const TomographyResult r = run_protocol_mps(build_mps(StateSpec::random_mps(64, 4, 8)), c);
  const double once = seconds_since(start);
  const bool windows = r.windows == 64 - r.k + 1 && static_cast<std::int64_t>(r.log.records.size()) == r.windows;

  double worst_ratio = 0.0;
  double previous = 0.0;
  for (int n : {32, 64, 128}) {
    const double t = best_time(build_mps(StateSpec::random_mps(n, 4, 8)), c, 7);
    if (previous > 0.0) worst_ratio = std::max(worst_ratio, t / previous);
    previous = t;
  }
  return {once < 60.0 && windows && worst_ratio <= 8.0,
          fmt("n=64 chi=4 MPS backend: %.3f s (< 60 s), %lld windows (= n-k+1 = %d); worst doubling time ratio "
              "%.2f (<= 8)",
              once, static_cast<long long>(r.windows), 64 - r.k + 1, worst_ratio)};
}

Outcome criterion9() {
  const DenseState ghz = build(StateSpec::ghz(6));
  double min_f = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ProtocolConfig c = config_for(2);
    c.noise.mode = NoiseMode::Shots;
    c.noise.shots = 1000000;
    c.noise.seed = seed;
    min_f = std::min(min_f, fidelity(ghz, to_mps(extract_tensors(run_protocol(ghz, c)))));
  }
  return {min_f >= 0.99, fmt("GHZ n=6, 1e6 shots per setting, 10 seeds: min fidelity %.6f (>= 0.99)", min_f)};
}

}  // namespace

int main() {
  double exact_seconds = 0.0;
  const std::vector<ExactRun> runs = exact_runs(exact_seconds);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exact reconstruction", [&] { return criterion1(runs, exact_seconds); }},
      {"oracle amplitude equivalence", criterion2},
      {"GHZ phase recovery", criterion3},
      {"W-state recovery", criterion4},
      {"bond bound", [&] { return criterion5(runs); }},
      {"certification soundness and completeness", criterion6},
      {"error-bound regime", criterion7},
      {"scaling", criterion8},
      {"shot-noise sanity", criterion9},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("raised ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] %zu. %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
