#include "mpstomo/state_factory.hpp"

#include <algorithm>
#include <cmath>

#include "mpstomo/error.hpp"
#include "mpstomo/mps_core.hpp"

namespace mpstomo {
namespace {

std::vector<int> parse_digits(const std::string& digits, int d) {
  std::vector<int> out;
  out.reserve(digits.size());
  for (char c : digits) {
    int value = -1;
    if (c >= '0' && c <= '9') value = c - '0';
    else if (c >= 'a' && c <= 'z') value = 10 + (c - 'a');
    if (value < 0 || value >= d) {
      throw Error(ErrorKind::InvalidSpec, std::string("digit '") + c + "' invalid for d=" +
                                              std::to_string(d));
    }
    out.push_back(value);
  }
  return out;
}

std::vector<double> w_phases(const StateSpec& spec) {
  if (spec.phases.empty()) return std::vector<double>(static_cast<std::size_t>(spec.n), 0.0);
  return spec.phases;
}

}  // namespace

std::string_view to_string(StateFamily family) {
  switch (family) {
    case StateFamily::Ghz: return "ghz";
    case StateFamily::W: return "w";
    case StateFamily::Product: return "product";
    case StateFamily::RandomMps: return "random_mps";
    case StateFamily::HaarRandom: return "haar_random";
  }
  return "unknown";
}

StateFamily parse_state_family(std::string_view name) {
  if (name == "ghz") return StateFamily::Ghz;
  if (name == "w") return StateFamily::W;
  if (name == "product") return StateFamily::Product;
  if (name == "random_mps") return StateFamily::RandomMps;
  if (name == "haar_random") return StateFamily::HaarRandom;
  throw Error(ErrorKind::InvalidSpec, "unknown state family '" + std::string(name) + "'");
}

StateSpec StateSpec::ghz(int n, double phi) {
  StateSpec spec;
  spec.family = StateFamily::Ghz;
  spec.n = n;
  spec.phi = phi;
  return spec;
}

StateSpec StateSpec::ghz(int n, Complex a, Complex b, double phi) {
  StateSpec spec = ghz(n, phi);
  spec.a = a;
  spec.b = b;
  return spec;
}

StateSpec StateSpec::w(int n, std::vector<double> phases) {
  StateSpec spec;
  spec.family = StateFamily::W;
  spec.n = n;
  spec.phases = std::move(phases);
  return spec;
}

StateSpec StateSpec::product(std::string digits, int d) {
  StateSpec spec;
  spec.family = StateFamily::Product;
  spec.n = static_cast<int>(digits.size());
  spec.d = d;
  spec.digits = std::move(digits);
  return spec;
}

StateSpec StateSpec::random_mps(int n, int chi, std::uint64_t seed, int d) {
  StateSpec spec;
  spec.family = StateFamily::RandomMps;
  spec.n = n;
  spec.d = d;
  spec.chi = chi;
  spec.seed = seed;
  return spec;
}

StateSpec StateSpec::haar_random(int n, std::uint64_t seed, int d) {
  StateSpec spec;
  spec.family = StateFamily::HaarRandom;
  spec.n = n;
  spec.d = d;
  spec.seed = seed;
  return spec;
}

void StateSpec::validate() const {
  if (n < 1) throw Error(ErrorKind::InvalidSpec, "n must be >= 1");
  if (d < 2) throw Error(ErrorKind::InvalidSpec, "d must be >= 2");
  switch (family) {
    case StateFamily::Ghz: {
      const double mass = std::norm(a) + std::norm(b);
      if (std::abs(mass - 1.0) > 1e-12) {
        throw Error(ErrorKind::InvalidSpec, "ghz needs |a|^2 + |b|^2 = 1");
      }
      break;
    }
    case StateFamily::W:
      if (!phases.empty() && static_cast<int>(phases.size()) != n) {
        throw Error(ErrorKind::InvalidSpec, "w phase list must have length n");
      }
      break;
    case StateFamily::Product:
      if (static_cast<int>(digits.size()) != n) {
        throw Error(ErrorKind::InvalidSpec, "product digit string must have length n");
      }
      parse_digits(digits, d);
      break;
    case StateFamily::RandomMps:
      if (chi < 1) throw Error(ErrorKind::InvalidSpec, "random_mps needs chi >= 1");
      break;
    case StateFamily::HaarRandom:
      break;
  }
}

DenseState build(const StateSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const int d = spec.d;
  switch (spec.family) {
    case StateFamily::Ghz: {
      if (ipow(d, n) > kDenseGuard) throw Error(ErrorKind::SizeExceeded, "d^n over dense guard");
      Vector amps = Vector::Zero(ipow(d, n));
      std::int64_t ones = 0;
      for (int i = 0; i < n; ++i) ones = ones * d + 1;
      amps(0) += spec.a;
      amps(ones) += std::polar(1.0, spec.phi) * spec.b;
      return DenseState::normalized(n, d, std::move(amps));
    }
    case StateFamily::W: {
      if (ipow(d, n) > kDenseGuard) throw Error(ErrorKind::SizeExceeded, "d^n over dense guard");
      const std::vector<double> phases = w_phases(spec);
      Vector amps = Vector::Zero(ipow(d, n));
      const double scale = 1.0 / std::sqrt(static_cast<double>(n));
      for (int j = 0; j < n; ++j) {
        amps(ipow(d, n - 1 - j)) = std::polar(scale, phases[static_cast<std::size_t>(j)]);
      }
      return DenseState::normalized(n, d, std::move(amps));
    }
    case StateFamily::Product:
      return DenseState::basis(d, parse_digits(spec.digits, d));
    case StateFamily::RandomMps:
      return dense_from_mps(build_mps(spec));
    case StateFamily::HaarRandom: {
      if (ipow(d, n) > kDenseGuard) throw Error(ErrorKind::SizeExceeded, "d^n over dense guard");
      Rng rng(spec.seed);
      return DenseState::normalized(n, d, complex_gaussian_vector(ipow(d, n), rng));
    }
  }
  throw Error(ErrorKind::InvalidSpec, "unhandled family");
}

MpsState build_mps(const StateSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const int d = spec.d;
  switch (spec.family) {
    case StateFamily::Ghz: {
      // Diagonal bond-2 construction; the branch weights ride on the left boundary.
      SiteTensor site(static_cast<std::size_t>(d), Matrix::Zero(2, 2));
      site[0](0, 0) = 1.0;
      site[1](1, 1) = 1.0;
      RowVector left(2);
      left << spec.a, std::polar(1.0, spec.phi) * spec.b;
      return MpsState(d, std::vector<SiteTensor>(static_cast<std::size_t>(n), site), left,
                      Vector::Ones(2))
          .normalized();
    }
    case StateFamily::W: {
      // Bond state 0: excitation not yet placed; 1: already placed.
      const std::vector<double> phases = w_phases(spec);
      const double scale = 1.0 / std::sqrt(static_cast<double>(n));
      std::vector<SiteTensor> sites;
      for (int j = 0; j < n; ++j) {
        SiteTensor site(static_cast<std::size_t>(d), Matrix::Zero(2, 2));
        site[0] = Matrix::Identity(2, 2);
        site[1](0, 1) = std::polar(scale, phases[static_cast<std::size_t>(j)]);
        sites.push_back(std::move(site));
      }
      RowVector left(2);
      left << 1.0, 0.0;
      Vector right(2);
      right << 0.0, 1.0;
      return MpsState(d, std::move(sites), left, right).normalized();
    }
    case StateFamily::Product: {
      std::vector<SiteTensor> sites;
      for (int z : parse_digits(spec.digits, d)) {
        SiteTensor site(static_cast<std::size_t>(d), Matrix::Zero(1, 1));
        site[static_cast<std::size_t>(z)](0, 0) = 1.0;
        sites.push_back(std::move(site));
      }
      return MpsState(d, std::move(sites), Gauge::LeftCanonical);
    }
    case StateFamily::RandomMps: {
      Rng rng(spec.seed);
      // min(chi, d^i, d^(n-i)), computed without forming large powers.
      auto capped_pow = [&](int exponent) {
        std::int64_t value = 1;
        for (int e = 0; e < exponent && value < spec.chi; ++e) value *= d;
        return std::min<std::int64_t>(value, spec.chi);
      };
      auto bond = [&](int i) -> Eigen::Index {
        return static_cast<Eigen::Index>(std::min(capped_pow(i), capped_pow(n - i)));
      };
      std::vector<SiteTensor> sites;
      for (int i = 0; i < n; ++i) {
        SiteTensor site;
        for (int z = 0; z < d; ++z) site.push_back(complex_gaussian_matrix(bond(i), bond(i + 1), rng));
        sites.push_back(std::move(site));
      }
      return left_canonicalize(MpsState(d, std::move(sites)));
    }
    case StateFamily::HaarRandom:
      throw Error(ErrorKind::InvalidSpec, "haar_random has no MPS construction");
  }
  throw Error(ErrorKind::InvalidSpec, "unhandled family");
}

DenseState perturb(const DenseState& state, double delta, std::uint64_t seed) {
  if (delta < 0.0 || delta > 1.0) throw Error(ErrorKind::InvalidSpec, "delta must lie in [0, 1]");
  if (delta == 0.0) return state;
  Rng rng(seed);
  Vector g = complex_gaussian_vector(state.dim(), rng);
  g.normalize();
  return DenseState::normalized(state.n(), state.d(), state.amplitudes() + delta * g);
}

MpsState scramble_windows(const MpsState& state, int layers, std::uint64_t seed) {
  Rng rng(seed);
  const int d = state.d();
  MpsState out = state;
  for (int layer = 0; layer < layers; ++layer) {
    for (int first = layer % 2; first + 1 < out.n(); first += 2) {
      out = apply_window_unitary(out, haar_unitary(d * d, rng), first);
    }
  }
  return out.normalized();
}

}  // namespace mpstomo
