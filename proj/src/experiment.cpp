#include "mpstomo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "mpstomo/certification.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/mps_core.hpp"
#include "mpstomo/reconstruction.hpp"

namespace mpstomo {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

std::string join_path(const std::string& where, std::string_view key) {
  return where.empty() ? std::string(key) : where + "." + std::string(key);
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> keys,
                    const std::string& where) {
  if (!obj.is_object()) config_error((where.empty() ? "config" : where) + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
      config_error("unknown field '" + join_path(where, item.key()) + "'");
    }
  }
}

template <class T>
std::optional<T> field(const json& obj, std::string_view key, const std::string& where) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) return std::nullopt;
  const std::string name = join_path(where, key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) config_error(name + " must be a boolean");
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!it->is_number_unsigned()) config_error(name + " must be a non-negative integer");
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) config_error(name + " must be an integer");
    const auto wide = it->get<std::int64_t>();
    if (wide < std::numeric_limits<T>::min() || wide > std::numeric_limits<T>::max()) {
      config_error(name + " is out of range");
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!it->is_number()) config_error(name + " must be a number");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) config_error(name + " must be a string");
  }
  return it->get<T>();
}

std::optional<Complex> complex_field(const json& obj, std::string_view key, const std::string& where) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_number()) return Complex(it->get<double>(), 0.0);
  if (it->is_array() && it->size() == 2 && (*it)[0].is_number() && (*it)[1].is_number()) {
    return Complex((*it)[0].get<double>(), (*it)[1].get<double>());
  }
  config_error(join_path(where, key) + " must be a number or a [re, im] pair");
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json complex_array(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

template <class E>
E parse_enum(std::string_view name, std::initializer_list<std::pair<std::string_view, E>> table,
             std::string_view what) {
  for (const auto& [key, value] : table) {
    if (key == name) return value;
  }
  config_error("unknown " + std::string(what) + " '" + std::string(name) + "'");
}

template <class Fn>
auto as_config_error(const std::string& prefix, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError && e.detail().rfind(prefix, 0) == 0) throw;
    config_error(prefix + e.detail());
  }
}

/// Checks everything except the fit between window length and state size.
void validate_fields(const ExperimentConfig& c) {
  if (c.trials < 1) config_error("trials must be >= 1");
  if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) config_error("threshold must lie in [0, 1]");
  if (!(c.perturbation >= 0.0)) config_error("state.perturbation must be >= 0");
  if (c.protocol.chi < 1) config_error("protocol.chi must be >= 1");
  if (c.protocol.k && *c.protocol.k < 1) config_error("protocol.k must be >= 1");
  if (c.protocol.bond_cap < 1) config_error("protocol.bond_cap must be >= 1");
  const double abort = c.protocol.truncation_abort_threshold;
  if (!(abort >= 0.0 && abort <= 1.0)) {
    config_error("protocol.truncation_abort_threshold must lie in [0, 1]");
  }
  as_config_error("protocol.", [&] { c.protocol.noise.validate(); });
  if (c.bench.sizes.empty()) config_error("bench.sizes must not be empty");
  for (int n : c.bench.sizes) {
    if (n < 1) config_error("bench.sizes entries must be >= 1");
  }
  if (c.bench.repeats < 1) config_error("bench.repeats must be >= 1");
}

template <class Task>
std::vector<json> parallel_map(int count, Task&& task) {
  std::vector<json> out(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        out[static_cast<std::size_t>(i)] = task(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int threads = std::min(worker_threads(), count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  // lowest failing index wins, independent of scheduling
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double wrap_phase(double x) {
  const double two_pi = 2.0 * std::numbers::pi;
  x = std::fmod(x, two_pi);
  return x < 0.0 ? x + two_pi : x;
}

double phase_error(double a, double b) {
  const double diff = wrap_phase(a - b);
  return std::min(diff, 2.0 * std::numbers::pi - diff);
}

json certificate_json(const Certificate& c) {
  return {{"cumulative_bound", c.cumulative_bound},
          {"threshold", c.threshold},
          {"accepted", c.accepted},
          {"step_errors", c.step_errors}};
}

json log_json(const TomographyResult& r) {
  std::vector<double> probabilities;
  double residual = 0.0;
  for (const auto& rec : r.log.records) {
    probabilities.push_back(rec.probability);
    residual = std::max(residual, rec.residual_mass);
  }
  const double min_p = probabilities.empty() ? 1.0 : *std::min_element(probabilities.begin(), probabilities.end());
  return {{"windows", r.windows},
          {"probabilities", probabilities},
          {"min_probability", min_p},
          {"total_error", r.log.total_error()},
          {"max_residual_mass", residual}};
}

struct Prepared {
  StateSpec spec;
  ProtocolConfig protocol;
  Backend backend = Backend::Dense;
  std::uint64_t trial_seed = 0;
  std::optional<DenseState> dense;
  std::optional<MpsState> mps;
};

Prepared prepare(const ExperimentConfig& config, StateSpec spec, std::uint64_t trial_seed) {
  Prepared p{std::move(spec), config.protocol, Backend::Dense, trial_seed, {}, {}};
  p.protocol.noise.seed = derive_seed(trial_seed, 1);
  p.backend = resolve_backend(config.backend, p.spec.n, p.spec.d);
  if (p.backend == Backend::Dense) {
    p.dense = build(p.spec);
    if (config.perturbation > 0.0) p.dense = perturb(*p.dense, config.perturbation, derive_seed(trial_seed, 2));
  } else {
    if (config.perturbation > 0.0) config_error("state.perturbation requires the dense backend");
    p.mps = build_mps(p.spec);
  }
  return p;
}

TomographyResult execute(const Prepared& p) {
  return p.dense ? run_protocol(*p.dense, p.protocol) : run_protocol_mps(*p.mps, p.protocol);
}

double fidelity_to_input(const Prepared& p, const MpsState& reconstruction) {
  return p.dense ? fidelity(*p.dense, reconstruction) : fidelity(*p.mps, reconstruction);
}

Error with_trial_context(const Error& e, int index) {
  return Error(e.kind(), "trial " + std::to_string(index) + ": " + e.detail());
}

json protocol_trial(const ExperimentConfig& config, int index, bool reconstruct) {
  const std::uint64_t trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(index));
  try {
    Prepared p = prepare(config, config.state_for(trial_seed), trial_seed);
    // certification needs the complete log, so the cascade is never cut short
    if (!reconstruct) p.protocol.truncation_abort_threshold = 1.0;

    const auto start = std::chrono::steady_clock::now();
    const TomographyResult result = execute(p);
    json record{{"record", "trial"},
                {"index", index},
                {"seeds", {{"trial", trial_seed}, {"state", p.spec.seed}, {"noise", p.protocol.noise.seed}}},
                {"backend", to_string(p.backend)},
                {"n", result.n},
                {"d", result.d},
                {"k", result.k}};
    json metrics{{"windows", result.windows},
                 {"settings_per_window", result.settings_per_window},
                 {"measurement_settings", result.measurement_settings()}};
    if (reconstruct) {
      const MpsState rec = to_mps(extract_tensors(result));
      record["fidelity"] = fidelity_to_input(p, rec);
      record["eta"] = complex_array(result.eta);
      metrics["max_bond"] = rec.max_bond();
    }
    const Certificate cert = certify(result.log, config.threshold, p.protocol.noise);
    metrics["wall_seconds"] = seconds_since(start);
    record["certificate"] = certificate_json(cert);
    record["log"] = log_json(result);
    record["metrics"] = std::move(metrics);
    return record;
  } catch (const Error& e) {
    throw with_trial_context(e, index);
  }
}

json header_json(const std::string& command, const ExperimentConfig& config) {
  return {{"record", "header"},
          {"command", command},
          {"version", kVersion},
          {"seed", config.seed},
          {"config", config.to_json()}};
}

RunManifest protocol_campaign(const ExperimentConfig& config, bool reconstruct) {
  config.validate();
  RunManifest m;
  m.command = reconstruct ? "run" : "certify";
  m.header = header_json(m.command, config);
  m.trials = parallel_map(config.trials, [&](int i) { return protocol_trial(config, i, reconstruct); });

  int accepted = 0;
  double worst_bound = 0.0;
  double min_p = 1.0;
  double min_f = 1.0;
  double sum_f = 0.0;
  for (const json& t : m.trials) {
    if (t["certificate"]["accepted"].get<bool>()) ++accepted;
    worst_bound = std::max(worst_bound, t["certificate"]["cumulative_bound"].get<double>());
    min_p = std::min(min_p, t["log"]["min_probability"].get<double>());
    if (reconstruct) {
      min_f = std::min(min_f, t["fidelity"].get<double>());
      sum_f += t["fidelity"].get<double>();
    }
  }
  m.summary = {{"record", "summary"},
               {"trials", config.trials},
               {"accepted", accepted},
               {"rejected", config.trials - accepted},
               {"max_cumulative_bound", worst_bound},
               {"min_probability", min_p},
               {"verdict", accepted == config.trials ? "accept" : "reject"}};
  if (reconstruct) {
    m.summary["min_fidelity"] = min_f;
    m.summary["mean_fidelity"] = sum_f / config.trials;
  }
  return m;
}

StateSpec bench_state(const ExperimentConfig& config, int n, std::uint64_t seed) {
  StateSpec spec = config.state_for(seed);
  spec.n = n;
  if (spec.family == StateFamily::Product) {
    const std::string pattern = spec.digits.empty() ? std::string("0") : spec.digits;
    spec.digits.clear();
    for (int i = 0; i < n; ++i) spec.digits.push_back(pattern[static_cast<std::size_t>(i) % pattern.size()]);
  }
  if (spec.family == StateFamily::W) spec.phases.clear();
  return spec;
}

const std::vector<std::string>& table_columns(const std::string& command) {
  static const std::vector<std::string> run{
      "/index", "/seeds/trial", "/backend", "/fidelity", "/certificate/cumulative_bound",
      "/certificate/accepted", "/log/min_probability", "/metrics/measurement_settings",
      "/metrics/max_bond", "/metrics/wall_seconds"};
  static const std::vector<std::string> certify{
      "/index", "/seeds/trial", "/backend", "/certificate/cumulative_bound", "/certificate/accepted",
      "/log/min_probability", "/metrics/measurement_settings", "/metrics/wall_seconds"};
  static const std::vector<std::string> bench{
      "/n", "/k", "/backend", "/windows", "/settings_per_window", "/measurement_settings",
      "/full_tomography_parameters", "/min_probability", "/postprocess_seconds", "/time_ratio_prev"};
  static const std::vector<std::string> demo{
      "/index", "/family", "/n", "/max_phase_error", "/fidelity"};
  if (command == "run") return run;
  if (command == "certify") return certify;
  if (command == "bench") return bench;
  return demo;
}

std::string cell(const json& value) {
  if (value.is_null()) return "NA";
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

}  // namespace

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Dense: return "dense";
    case Backend::Mps: return "mps";
    case Backend::Auto: return "auto";
  }
  return "auto";
}

Backend parse_backend(std::string_view name) {
  return parse_enum<Backend>(name, {{"dense", Backend::Dense}, {"mps", Backend::Mps}, {"auto", Backend::Auto}},
                             "backend");
}

std::string_view to_string(OutputFormat format) {
  return format == OutputFormat::Records ? "records" : "table";
}

OutputFormat parse_output_format(std::string_view name) {
  return parse_enum<OutputFormat>(name, {{"records", OutputFormat::Records}, {"table", OutputFormat::Table}},
                                  "format");
}

std::string_view to_string(BoundaryGauge gauge) {
  return gauge == BoundaryGauge::Schmidt ? "schmidt" : "eigen";
}

BoundaryGauge parse_boundary_gauge(std::string_view name) {
  return parse_enum<BoundaryGauge>(name, {{"schmidt", BoundaryGauge::Schmidt}, {"eigen", BoundaryGauge::Eigen}},
                                   "boundary gauge");
}

StateSpec ExperimentConfig::state_for(std::uint64_t trial_seed) const {
  StateSpec spec = state;
  if (!state_chi_fixed) spec.chi = protocol.chi;
  if (!state_seed_fixed) spec.seed = derive_seed(trial_seed, 0);
  return spec;
}

void ExperimentConfig::validate() const {
  validate_fields(*this);
  as_config_error("state: ", [&] { state_for(seed).validate(); });
  as_config_error("protocol.", [&] { return protocol.resolved_k(state.d, state.n); });
}

json ExperimentConfig::to_json() const {
  json st{{"family", mpstomo::to_string(state.family)}, {"n", state.n}, {"d", state.d}};
  switch (state.family) {
    case StateFamily::Ghz:
      st["a"] = complex_json(state.a);
      st["b"] = complex_json(state.b);
      st["phi"] = state.phi;
      break;
    case StateFamily::W:
      st["phases"] = state.phases;
      break;
    case StateFamily::Product:
      st["digits"] = state.digits;
      break;
    case StateFamily::RandomMps:
    case StateFamily::HaarRandom:
      break;
  }
  if (state_chi_fixed) st["chi"] = state.chi;
  if (state_seed_fixed) st["seed"] = state.seed;
  if (perturbation > 0.0) st["perturbation"] = perturbation;

  json noise{{"mode", mpstomo::to_string(protocol.noise.mode)},
             {"epsilon", protocol.noise.epsilon},
             {"shots", protocol.noise.shots}};
  json proto{{"chi", protocol.chi},
             {"truncation_abort_threshold", protocol.truncation_abort_threshold},
             {"boundary_gauge", mpstomo::to_string(protocol.boundary_gauge)},
             {"bond_cap", protocol.bond_cap},
             {"noise", noise}};
  if (protocol.k) proto["k"] = *protocol.k;
  if (protocol.gauge_seed) proto["gauge_seed"] = *protocol.gauge_seed;

  json doc{{"state", st},
           {"protocol", proto},
           {"trials", trials},
           {"seed", seed},
           {"format", mpstomo::to_string(format)},
           {"backend", mpstomo::to_string(backend)},
           {"threshold", threshold},
           {"bench", {{"sizes", bench.sizes}, {"repeats", bench.repeats}}}};
  if (out) doc["out"] = *out;
  return doc;
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  ExperimentConfig c;
  reject_unknown(doc, {"state", "protocol", "trials", "seed", "out", "format", "backend", "threshold", "bench"}, "");

  if (const auto it = doc.find("state"); it != doc.end()) {
    const json& s = *it;
    reject_unknown(s, {"family", "n", "d", "a", "b", "phi", "phases", "digits", "chi", "seed", "perturbation"}, "state");
    if (auto v = field<std::string>(s, "family", "state")) {
      c.state.family = as_config_error("state.family: ", [&] { return parse_state_family(*v); });
    }
    if (auto v = field<std::string>(s, "digits", "state")) {
      c.state.digits = *v;
      c.state.n = static_cast<int>(v->size());
    }
    if (auto v = field<int>(s, "n", "state")) c.state.n = *v;
    if (auto v = field<int>(s, "d", "state")) c.state.d = *v;
    if (auto v = complex_field(s, "a", "state")) c.state.a = *v;
    if (auto v = complex_field(s, "b", "state")) c.state.b = *v;
    if (auto v = field<double>(s, "phi", "state")) c.state.phi = *v;
    if (const auto p = s.find("phases"); p != s.end()) {
      if (!p->is_array() || !std::all_of(p->begin(), p->end(), [](const json& x) { return x.is_number(); })) {
        config_error("state.phases must be an array of numbers");
      }
      c.state.phases = p->get<std::vector<double>>();
    }
    if (auto v = field<int>(s, "chi", "state")) {
      c.state.chi = *v;
      c.state_chi_fixed = true;
    }
    if (auto v = field<double>(s, "perturbation", "state")) c.perturbation = *v;
    if (auto v = field<std::uint64_t>(s, "seed", "state")) {
      c.state.seed = *v;
      c.state_seed_fixed = true;
    }
  }

  if (const auto it = doc.find("protocol"); it != doc.end()) {
    const json& p = *it;
    reject_unknown(p, {"chi", "k", "truncation_abort_threshold", "boundary_gauge", "bond_cap", "gauge_seed", "noise"},
                   "protocol");
    if (auto v = field<int>(p, "chi", "protocol")) c.protocol.chi = *v;
    if (auto v = field<int>(p, "k", "protocol")) c.protocol.k = *v;
    if (auto v = field<double>(p, "truncation_abort_threshold", "protocol")) {
      c.protocol.truncation_abort_threshold = *v;
    }
    if (auto v = field<std::string>(p, "boundary_gauge", "protocol")) {
      c.protocol.boundary_gauge = parse_boundary_gauge(*v);
    }
    if (auto v = field<std::int64_t>(p, "bond_cap", "protocol")) c.protocol.bond_cap = *v;
    if (auto v = field<std::uint64_t>(p, "gauge_seed", "protocol")) c.protocol.gauge_seed = *v;
    if (const auto nz = p.find("noise"); nz != p.end()) {
      reject_unknown(*nz, {"mode", "epsilon", "shots"}, "protocol.noise");
      if (auto v = field<std::string>(*nz, "mode", "protocol.noise")) {
        c.protocol.noise.mode = as_config_error("protocol.noise.mode: ", [&] { return parse_noise_mode(*v); });
      }
      if (auto v = field<double>(*nz, "epsilon", "protocol.noise")) c.protocol.noise.epsilon = *v;
      if (auto v = field<std::int64_t>(*nz, "shots", "protocol.noise")) c.protocol.noise.shots = *v;
    }
  }

  if (auto v = field<int>(doc, "trials", "")) c.trials = *v;
  if (auto v = field<std::uint64_t>(doc, "seed", "")) c.seed = *v;
  if (auto v = field<std::string>(doc, "out", "")) c.out = *v;
  if (auto v = field<std::string>(doc, "format", "")) c.format = parse_output_format(*v);
  if (auto v = field<std::string>(doc, "backend", "")) c.backend = parse_backend(*v);
  if (auto v = field<double>(doc, "threshold", "")) c.threshold = *v;
  if (const auto it = doc.find("bench"); it != doc.end()) {
    reject_unknown(*it, {"sizes", "repeats"}, "bench");
    if (const auto s = it->find("sizes"); s != it->end()) {
      if (!s->is_array() || !std::all_of(s->begin(), s->end(), [](const json& x) { return x.is_number_integer(); })) {
        config_error("bench.sizes must be an array of integers");
      }
      c.bench.sizes = s->get<std::vector<int>>();
    }
    if (auto v = field<int>(*it, "repeats", "bench")) c.bench.repeats = *v;
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    config_error("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

Backend resolve_backend(Backend requested, int n, int d) {
  if (requested != Backend::Auto) return requested;
  try {
    return ipow(d, n) <= kDenseGuard ? Backend::Dense : Backend::Mps;
  } catch (const Error&) {
    return Backend::Mps;
  }
}

int worker_threads() {
  if (const char* env = std::getenv("MPSTOMO_THREADS")) {
    int value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end && value >= 1) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int RunManifest::exit_code() const {
  return summary.value("verdict", "accept") == "reject" ? 2 : 0;
}

std::vector<json> RunManifest::records() const {
  std::vector<json> out;
  out.reserve(trials.size() + 2);
  out.push_back(header);
  out.insert(out.end(), trials.begin(), trials.end());
  out.push_back(summary);
  return out;
}

std::string RunManifest::to_records() const {
  std::string out;
  for (const json& r : records()) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::string RunManifest::to_table() const {
  std::ostringstream out;
  out << "# mpstomo " << command << " version=" << kVersion << " seed=" << header.value("seed", json()).dump() << '\n';
  if (command == "bench" && summary.contains("reference")) {
    const json& ref = summary["reference"];
    out << "# full tomography at n=" << ref["n"].dump() << ": " << ref["full_tomography_parameters"].dump()
        << " real parameters\n";
  }
  const auto& columns = table_columns(command);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << (i ? "\t" : "") << columns[i].substr(columns[i].rfind('/') + 1);
  }
  out << '\n';
  for (const json& t : trials) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const json::json_pointer ptr(columns[i]);
      out << (i ? "\t" : "") << (t.contains(ptr) ? cell(t.at(ptr)) : "NA");
    }
    out << '\n';
  }
  return out.str();
}

std::string RunManifest::render(OutputFormat format) const {
  return format == OutputFormat::Records ? to_records() : to_table();
}

RunManifest cmd_run(const ExperimentConfig& config) { return protocol_campaign(config, true); }

RunManifest cmd_certify(const ExperimentConfig& config) { return protocol_campaign(config, false); }

RunManifest cmd_bench(const ExperimentConfig& config) {
  validate_fields(config);
  RunManifest m;
  m.command = "bench";
  m.header = header_json(m.command, config);

  // one backend for the whole sweep, chosen by its largest size, so that
  // timings along the sweep are comparable
  ExperimentConfig sweep = config;
  sweep.backend = resolve_backend(config.backend, *std::max_element(config.bench.sizes.begin(), config.bench.sizes.end()),
                                  config.state.d);

  std::optional<double> previous;
  bool linear = true;
  for (std::size_t i = 0; i < config.bench.sizes.size(); ++i) {
    const int n = config.bench.sizes[i];
    const std::uint64_t seed = derive_seed(config.seed, i);
    try {
      as_config_error("protocol.", [&] { return config.protocol.resolved_k(config.state.d, n); });
      const Prepared p = prepare(sweep, bench_state(config, n, seed), seed);

      double best = std::numeric_limits<double>::infinity();
      TomographyResult result;
      for (int rep = 0; rep < config.bench.repeats; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        result = execute(p);
        const ExtractedTensors tensors = extract_tensors(result);
        best = std::min(best, seconds_since(start));
      }
      linear = linear && result.windows == n - result.k + 1 &&
               result.measurement_settings() == result.windows * result.settings_per_window;
      const json log = log_json(result);
      json row{{"record", "bench"},
               {"index", i},
               {"n", n},
               {"d", result.d},
               {"k", result.k},
               {"chi", config.protocol.chi},
               {"backend", to_string(p.backend)},
               {"seeds", {{"trial", seed}, {"state", p.spec.seed}, {"noise", p.protocol.noise.seed}}},
               {"windows", result.windows},
               {"settings_per_window", result.settings_per_window},
               {"measurement_settings", result.measurement_settings()},
               {"full_tomography_parameters", std::pow(static_cast<double>(result.d), 2.0 * n) - 1.0},
               {"min_probability", log["min_probability"]},
               {"postprocess_seconds", best},
               {"time_ratio_prev", previous ? json(best / *previous) : json()}};
      previous = best;
      m.trials.push_back(std::move(row));
    } catch (const Error& e) {
      throw Error(e.kind(), "bench n=" + std::to_string(n) + ": " + e.detail());
    }
  }
  m.summary = {{"record", "summary"},
               {"trials", m.trials.size()},
               {"settings_linear", linear},
               {"reference", {{"n", 10}, {"d", 2}, {"full_tomography_parameters", (std::int64_t{1} << 20) - 1}}}};
  return m;
}

RunManifest cmd_demo(const ExperimentConfig& config, StateFamily family) {
  if (family != StateFamily::Ghz && family != StateFamily::W) config_error("demo family must be ghz or w");
  validate_fields(config);
  const bool own = config.state.family == family;
  const int n = own ? config.state.n : (family == StateFamily::Ghz ? 6 : 5);
  ExperimentConfig demo = config;
  demo.protocol.chi = 2;
  if (!own) demo.state = family == StateFamily::Ghz ? StateSpec::ghz(n) : StateSpec::w(n);
  as_config_error("protocol.", [&] { return demo.protocol.resolved_k(2, n); });

  RunManifest m;
  m.command = "demo";
  m.header = header_json(m.command, config);
  m.header["family"] = to_string(family);
  m.trials = parallel_map(demo.trials, [&](int index) {
    const std::uint64_t trial_seed = derive_seed(demo.seed, static_cast<std::uint64_t>(index));
    const std::uint64_t phase_seed = derive_seed(trial_seed, 0);
    Rng rng(phase_seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    StateSpec spec = demo.state;
    spec.n = n;
    std::vector<double> planted;
    if (family == StateFamily::Ghz) {
      spec.phi = angle(rng);
      planted.push_back(spec.phi);
    } else {
      spec.phases.assign(static_cast<std::size_t>(n), 0.0);
      for (double& ph : spec.phases) ph = angle(rng);
      for (double ph : spec.phases) planted.push_back(wrap_phase(ph - spec.phases.front()));
    }
    try {
      const Prepared p = prepare(demo, spec, trial_seed);
      const TomographyResult result = execute(p);
      const ExtractedTensors tensors = extract_tensors(result);

      // phases are read off amplitude ratios, which no gauge choice can change
      std::vector<double> recovered;
      double worst = 0.0;
      if (family == StateFamily::Ghz) {
        const Complex c0 = amplitude(tensors, std::string(static_cast<std::size_t>(n), '0'));
        const Complex c1 = amplitude(tensors, std::string(static_cast<std::size_t>(n), '1'));
        recovered.push_back(wrap_phase(std::arg(c1 / c0) - std::arg(spec.b / spec.a)));
      } else {
        std::vector<int> digits(static_cast<std::size_t>(n), 0);
        digits[0] = 1;
        const Complex c0 = amplitude(tensors, digits);
        for (int j = 0; j < n; ++j) {
          std::fill(digits.begin(), digits.end(), 0);
          digits[static_cast<std::size_t>(j)] = 1;
          recovered.push_back(wrap_phase(std::arg(amplitude(tensors, digits) / c0)));
        }
      }
      for (std::size_t j = 0; j < planted.size(); ++j) worst = std::max(worst, phase_error(planted[j], recovered[j]));
      return json{{"record", "demo"},
                  {"index", index},
                  {"family", to_string(family)},
                  {"n", n},
                  {"k", result.k},
                  {"seeds", {{"trial", trial_seed}, {"phase", phase_seed}, {"noise", p.protocol.noise.seed}}},
                  {"planted", planted},
                  {"recovered", recovered},
                  {"max_phase_error", worst},
                  {"fidelity", fidelity_to_input(p, to_mps(tensors))},
                  {"eta", complex_array(result.eta)}};
    } catch (const Error& e) {
      throw with_trial_context(e, index);
    }
  });

  double worst = 0.0;
  double min_f = 1.0;
  for (const json& t : m.trials) {
    worst = std::max(worst, t["max_phase_error"].get<double>());
    min_f = std::min(min_f, t["fidelity"].get<double>());
  }
  m.summary = {{"record", "summary"}, {"trials", demo.trials}, {"max_phase_error", worst}, {"min_fidelity", min_f}};
  return m;
}

namespace {

using Pred = bool (*)(const json&);

struct Rule {
  const char* pointer;
  Pred pred;
  const char* expected;
  bool required = true;
};

bool is_count(const json& j) { return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0); }
bool is_seed(const json& j) { return j.is_number_unsigned(); }
bool is_unit(const json& j) { return j.is_number() && j.get<double>() >= 0.0 && j.get<double>() <= 1.0 + 1e-9; }
bool is_nonneg(const json& j) { return j.is_number() && j.get<double>() >= 0.0; }
bool is_bool(const json& j) { return j.is_boolean(); }
bool is_string(const json& j) { return j.is_string(); }
bool is_object(const json& j) { return j.is_object(); }
bool is_backend(const json& j) { return j.is_string() && (j == "dense" || j == "mps"); }
bool is_command(const json& j) {
  return j.is_string() && (j == "run" || j == "certify" || j == "bench" || j == "demo");
}
bool is_family(const json& j) { return j.is_string() && (j == "ghz" || j == "w"); }
bool is_verdict(const json& j) { return j.is_string() && (j == "accept" || j == "reject"); }
bool is_number_array(const json& j) {
  return j.is_array() && std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_number(); });
}
bool is_complex_array(const json& j) {
  return j.is_array() && std::all_of(j.begin(), j.end(), [](const json& x) {
           return x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number();
         });
}
bool is_ratio(const json& j) { return j.is_null() || (j.is_number() && j.get<double>() >= 0.0); }

const std::vector<Rule> kHeaderRules{{"/command", is_command, "run|certify|bench|demo"},
                                     {"/version", is_string, "string"},
                                     {"/seed", is_seed, "unsigned integer"},
                                     {"/config", is_object, "object"}};

const std::vector<Rule> kTrialRules{
    {"/index", is_count, "non-negative integer"},
    {"/seeds/trial", is_seed, "unsigned integer"},
    {"/seeds/state", is_seed, "unsigned integer"},
    {"/seeds/noise", is_seed, "unsigned integer"},
    {"/backend", is_backend, "dense|mps"},
    {"/n", is_count, "non-negative integer"},
    {"/d", is_count, "non-negative integer"},
    {"/k", is_count, "non-negative integer"},
    {"/fidelity", is_unit, "number in [0, 1]", false},
    {"/eta", is_complex_array, "array of [re, im]", false},
    {"/certificate/cumulative_bound", is_unit, "number in [0, 1]"},
    {"/certificate/threshold", is_unit, "number in [0, 1]"},
    {"/certificate/accepted", is_bool, "boolean"},
    {"/certificate/step_errors", is_number_array, "array of numbers"},
    {"/log/windows", is_count, "non-negative integer"},
    {"/log/probabilities", is_number_array, "array of numbers"},
    {"/log/min_probability", is_unit, "number in [0, 1]"},
    {"/log/total_error", is_nonneg, "non-negative number"},
    {"/log/max_residual_mass", is_nonneg, "non-negative number"},
    {"/metrics/windows", is_count, "non-negative integer"},
    {"/metrics/settings_per_window", is_count, "non-negative integer"},
    {"/metrics/measurement_settings", is_count, "non-negative integer"},
    {"/metrics/max_bond", is_count, "non-negative integer", false},
    {"/metrics/wall_seconds", is_nonneg, "non-negative number"}};

const std::vector<Rule> kBenchRules{{"/index", is_count, "non-negative integer"},
                                    {"/n", is_count, "non-negative integer"},
                                    {"/d", is_count, "non-negative integer"},
                                    {"/k", is_count, "non-negative integer"},
                                    {"/chi", is_count, "non-negative integer"},
                                    {"/backend", is_backend, "dense|mps"},
                                    {"/seeds/trial", is_seed, "unsigned integer"},
                                    {"/windows", is_count, "non-negative integer"},
                                    {"/settings_per_window", is_count, "non-negative integer"},
                                    {"/measurement_settings", is_count, "non-negative integer"},
                                    {"/full_tomography_parameters", is_nonneg, "non-negative number"},
                                    {"/min_probability", is_unit, "number in [0, 1]"},
                                    {"/postprocess_seconds", is_nonneg, "non-negative number"},
                                    {"/time_ratio_prev", is_ratio, "null or non-negative number"}};

const std::vector<Rule> kDemoRules{{"/index", is_count, "non-negative integer"},
                                   {"/family", is_family, "ghz|w"},
                                   {"/n", is_count, "non-negative integer"},
                                   {"/k", is_count, "non-negative integer"},
                                   {"/seeds/trial", is_seed, "unsigned integer"},
                                   {"/seeds/phase", is_seed, "unsigned integer"},
                                   {"/planted", is_number_array, "array of numbers"},
                                   {"/recovered", is_number_array, "array of numbers"},
                                   {"/max_phase_error", is_nonneg, "non-negative number"},
                                   {"/fidelity", is_unit, "number in [0, 1]"},
                                   {"/eta", is_complex_array, "array of [re, im]"}};

const std::vector<Rule> kSummaryRules{{"/trials", is_count, "non-negative integer"},
                                      {"/verdict", is_verdict, "accept|reject", false},
                                      {"/accepted", is_count, "non-negative integer", false},
                                      {"/rejected", is_count, "non-negative integer", false},
                                      {"/min_fidelity", is_unit, "number in [0, 1]", false},
                                      {"/max_phase_error", is_nonneg, "non-negative number", false},
                                      {"/settings_linear", is_bool, "boolean", false}};

void apply_rules(const json& record, const std::vector<Rule>& rules, std::vector<std::string>& problems) {
  for (const Rule& rule : rules) {
    const json::json_pointer ptr(rule.pointer);
    if (!record.contains(ptr)) {
      if (rule.required) problems.push_back(std::string(rule.pointer) + " is missing");
    } else if (!rule.pred(record.at(ptr))) {
      problems.push_back(std::string(rule.pointer) + " must be " + rule.expected);
    }
  }
}

}  // namespace

std::vector<std::string> check_record(const json& record) {
  std::vector<std::string> problems;
  if (!record.is_object() || !record.contains("record") || !record["record"].is_string()) {
    problems.push_back("/record is missing");
    return problems;
  }
  const std::string kind = record["record"].get<std::string>();
  if (kind == "header") {
    apply_rules(record, kHeaderRules, problems);
  } else if (kind == "trial") {
    apply_rules(record, kTrialRules, problems);
    if (problems.empty() && record["log"]["probabilities"].size() != record["log"]["windows"].get<std::size_t>()) {
      problems.push_back("/log/probabilities must have one entry per window");
    }
  } else if (kind == "bench") {
    apply_rules(record, kBenchRules, problems);
  } else if (kind == "demo") {
    apply_rules(record, kDemoRules, problems);
  } else if (kind == "summary") {
    apply_rules(record, kSummaryRules, problems);
  } else {
    problems.push_back("/record must be header|trial|bench|demo|summary");
  }
  return problems;
}

json without_timing(json record) {
  if (record.contains("metrics")) record["metrics"].erase("wall_seconds");
  record.erase("postprocess_seconds");
  record.erase("time_ratio_prev");
  return record;
}

}  // namespace mpstomo
