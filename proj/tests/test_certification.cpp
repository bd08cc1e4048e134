#include <gtest/gtest.h>

#include <algorithm>

#include "mpstomo/certification.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/state_factory.hpp"
#include "mpstomo/tomography.hpp"

namespace mpstomo {
namespace {

ProtocolConfig lenient(int chi) {
  ProtocolConfig config;
  config.chi = chi;
  config.truncation_abort_threshold = 1.0;
  return config;
}

TruncationLog log_of(std::vector<double> probabilities) {
  TruncationLog log;
  log.expected_steps = static_cast<int>(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    log.records.push_back({static_cast<int>(i), probabilities[i], 1.0 - probabilities[i], 0.0});
  }
  return log;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::ConfigError;
}

TEST(Certify, ProductOfProbabilities) {
  const Certificate c = certify(log_of({0.9, 0.8, 1.0}), 0.3);
  EXPECT_NEAR(c.cumulative_bound, 1.0 - 0.72, 1e-15);
  EXPECT_TRUE(c.accepted);
  EXPECT_EQ(c.step_errors.size(), 3u);
  EXPECT_NEAR(c.step_errors[1], 0.2, 1e-15);
  EXPECT_FALSE(certify(log_of({0.9, 0.8, 1.0}), 0.2).accepted);
}

TEST(Certify, AcceptsExactMpsFamilies) {
  const std::vector<std::pair<StateSpec, int>> cases{
      {StateSpec::product("0110101"), 1},
      {StateSpec::ghz(7, 0.3), 2},
      {StateSpec::w(7), 2},
      {StateSpec::random_mps(7, 3, 1), 3},
      {StateSpec::random_mps(7, 4, 2), 4},
  };
  for (const auto& [spec, chi] : cases) {
    const Certificate c = certify(run_protocol(build(spec), lenient(chi)).log, 1e-6);
    EXPECT_TRUE(c.accepted) << to_string(spec.family);
    EXPECT_GE(c.cumulative_bound, 0.0);
  }
}

TEST(Certify, RejectsWrongBondHypothesis) {
  const Certificate c = certify(run_protocol(build(StateSpec::ghz(6)), lenient(1)).log, 0.1);
  EXPECT_FALSE(c.accepted);
  EXPECT_NEAR(c.step_errors.front(), 0.5, 1e-12);
}

TEST(Certify, RejectsHaarStates) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Certificate c = certify(run_protocol(build(StateSpec::haar_random(10, seed)), lenient(2)).log, 0.1);
    EXPECT_GT(c.cumulative_bound, 0.5) << seed;
    EXPECT_FALSE(c.accepted);
  }
}

TEST(Certify, IncompleteLogs) {
  EXPECT_EQ(kind_of([] { certify(TruncationLog{}, 0.1); }), ErrorKind::IncompleteLog);
  TruncationLog short_log = log_of({1.0, 1.0});
  short_log.expected_steps = 3;
  EXPECT_EQ(kind_of([&] { certify(short_log, 0.1); }), ErrorKind::IncompleteLog);
  TruncationLog shuffled = log_of({1.0, 0.9});
  std::swap(shuffled.records[0], shuffled.records[1]);
  EXPECT_EQ(kind_of([&] { certify(shuffled, 0.1); }), ErrorKind::IncompleteLog);
}

TEST(Certify, MonotoneInSteps) {
  std::vector<double> ps;
  double previous = 0.0;
  Rng rng(5);
  std::uniform_real_distribution<double> p(0.5, 1.0);
  for (int i = 0; i < 30; ++i) {
    ps.push_back(p(rng));
    const double bound = certify(log_of(ps), 0.5).cumulative_bound;
    EXPECT_GE(bound, previous);
    EXPECT_LE(bound, 1.0);
    previous = bound;
  }
}

TEST(CheckErrorBound, ZeroEpsilon) {
  const BoundReport r = check_error_bound(8, 0.0, 5, 1);
  ASSERT_EQ(r.trials.size(), 5u);
  for (const BoundTrial& t : r.trials) {
    EXPECT_LE(t.distance, 1e-9);
    EXPECT_EQ(t.ratio, 0.0);
  }
  EXPECT_EQ(r.max_ratio, 0.0);
  EXPECT_EQ(r.norm, "operator");
}

TEST(CheckErrorBound, SmallEpsilonRegime) {
  const BoundReport r = check_error_bound(8, 1e-3, 20, 7);
  EXPECT_LE(r.max_ratio, 1.0);
  EXPECT_GT(r.median_distance, 0.0);
  EXPECT_EQ(r.mean_deviation.size(), 7u);
  for (double dev : r.mean_deviation) EXPECT_GT(dev, 0.0);
}

TEST(CheckErrorBound, PairedSeedMonotonicity) {
  const BoundReport lo = check_error_bound(8, 1e-3, 20, 3);
  const BoundReport hi = check_error_bound(8, 2e-3, 20, 3);
  for (std::size_t t = 0; t < lo.trials.size(); ++t) EXPECT_EQ(lo.trials[t].seed, hi.trials[t].seed);
  EXPECT_GE(hi.median_distance, lo.median_distance);
}

TEST(CheckErrorBound, RejectsBadArguments) {
  EXPECT_EQ(kind_of([] { check_error_bound(8, 0.5, 2, 1); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { check_error_bound(8, 1e-3, 0, 1); }), ErrorKind::ConfigError);
}

}  // namespace
}  // namespace mpstomo
