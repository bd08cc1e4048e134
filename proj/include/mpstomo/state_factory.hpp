#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpstomo/dense_state.hpp"
#include "mpstomo/mps_state.hpp"

namespace mpstomo {

enum class StateFamily { Ghz, W, Product, RandomMps, HaarRandom };

std::string_view to_string(StateFamily family);
StateFamily parse_state_family(std::string_view name);

/// Description of a target state. Only the fields relevant to `family` are
/// read:
///   ghz         a|0..0> + e^{i phi} b|1..1>
///   w           n^{-1/2} sum_j e^{i phases[j]} |0..1_j..0>  (empty phases = all zero)
///   product     digits, one base-d digit per site
///   random_mps  chi, seed (Gaussian tensors, left-canonicalized)
///   haar_random seed
struct StateSpec {
  StateFamily family = StateFamily::Ghz;
  int n = 2;
  int d = 2;
  Complex a{1.0 / 1.4142135623730951, 0.0};
  Complex b{1.0 / 1.4142135623730951, 0.0};
  double phi = 0.0;
  std::vector<double> phases;
  std::string digits;
  int chi = 2;
  std::uint64_t seed = 0;

  static StateSpec ghz(int n, double phi = 0.0);
  static StateSpec ghz(int n, Complex a, Complex b, double phi);
  static StateSpec w(int n, std::vector<double> phases = {});
  static StateSpec product(std::string digits, int d = 2);
  static StateSpec random_mps(int n, int chi, std::uint64_t seed, int d = 2);
  static StateSpec haar_random(int n, std::uint64_t seed, int d = 2);

  /// Throws InvalidSpec when family-specific invariants fail.
  void validate() const;
};

DenseState build(const StateSpec& spec);

/// Not available for haar_random. Bond dimensions: ghz 2, w 2, product 1,
/// random_mps min(chi, d^i, d^(n-i)) at bond i.
MpsState build_mps(const StateSpec& spec);

/// (psi + delta g) / norm with g a seeded uniformly random unit vector.
DenseState perturb(const DenseState& state, double delta, std::uint64_t seed);

/// Applies `layers` brickwork layers of Haar-random two-site unitaries. Raises
/// bond dimension, so a state that was a bond-chi MPS stops being one; used as
/// a large-n negative control for certification.
MpsState scramble_windows(const MpsState& state, int layers, std::uint64_t seed);

}  // namespace mpstomo
