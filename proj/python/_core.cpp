#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mpstomo/certification.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/experiment.hpp"
#include "mpstomo/mps_core.hpp"
#include "mpstomo/reconstruction.hpp"
#include "mpstomo/state_factory.hpp"
#include "mpstomo/tomography.hpp"

namespace py = pybind11;
using namespace mpstomo;

namespace {

std::vector<double> probabilities(const TruncationLog& log) {
  std::vector<double> out;
  for (const auto& r : log.records) out.push_back(r.probability);
  return out;
}

std::vector<std::string> run_command(const std::string& command, const std::string& config_json,
                                     const std::string& family) {
  const ExperimentConfig config = ExperimentConfig::from_json(nlohmann::json::parse(config_json));
  RunManifest m;
  if (command == "run") {
    m = cmd_run(config);
  } else if (command == "certify") {
    m = cmd_certify(config);
  } else if (command == "bench") {
    m = cmd_bench(config);
  } else if (command == "demo") {
    m = cmd_demo(config, parse_state_family(family));
  } else {
    throw Error(ErrorKind::ConfigError, "unknown command '" + command + "'");
  }
  std::vector<std::string> out;
  for (const auto& r : m.records()) out.push_back(r.dump());
  return out;
}

std::vector<std::string> check_record_text(const std::string& text) {
  return check_record(nlohmann::json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Direct MPS tomography: core bindings";
  m.attr("__version__") = std::string(kVersion);

  // Instances carry the error kind as `.kind`.
  static py::handle error_type = py::exception<Error>(m, "MpstomoError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::enum_<StateFamily>(m, "StateFamily")
      .value("GHZ", StateFamily::Ghz)
      .value("W", StateFamily::W)
      .value("PRODUCT", StateFamily::Product)
      .value("RANDOM_MPS", StateFamily::RandomMps)
      .value("HAAR_RANDOM", StateFamily::HaarRandom);

  py::class_<StateSpec>(m, "StateSpec")
      .def_readwrite("family", &StateSpec::family)
      .def_readwrite("n", &StateSpec::n)
      .def_readwrite("d", &StateSpec::d)
      .def_readwrite("a", &StateSpec::a)
      .def_readwrite("b", &StateSpec::b)
      .def_readwrite("phi", &StateSpec::phi)
      .def_readwrite("phases", &StateSpec::phases)
      .def_readwrite("digits", &StateSpec::digits)
      .def_readwrite("chi", &StateSpec::chi)
      .def_readwrite("seed", &StateSpec::seed)
      .def("validate", &StateSpec::validate);

  m.def("ghz", py::overload_cast<int, Complex, Complex, double>(&StateSpec::ghz), py::arg("n"),
        py::arg("a") = Complex(1.0 / std::sqrt(2.0)), py::arg("b") = Complex(1.0 / std::sqrt(2.0)),
        py::arg("phi") = 0.0);
  m.def("w", &StateSpec::w, py::arg("n"), py::arg("phases") = std::vector<double>{});
  m.def("product", &StateSpec::product, py::arg("digits"), py::arg("d") = 2);
  m.def("random_mps", &StateSpec::random_mps, py::arg("n"), py::arg("chi"), py::arg("seed"), py::arg("d") = 2);
  m.def("haar_random", &StateSpec::haar_random, py::arg("n"), py::arg("seed"), py::arg("d") = 2);

  py::class_<DenseState>(m, "DenseState")
      .def(py::init<int, int, Vector>(), py::arg("n"), py::arg("d"), py::arg("amplitudes"))
      .def_property_readonly("n", &DenseState::n)
      .def_property_readonly("d", &DenseState::d)
      .def_property_readonly("amplitudes", [](const DenseState& s) { return Vector(s.amplitudes()); });

  py::class_<MpsState>(m, "MpsState")
      .def_property_readonly("n", &MpsState::n)
      .def_property_readonly("d", &MpsState::d)
      .def_property_readonly("bond_dimensions", &MpsState::bond_dimensions)
      .def_property_readonly("max_bond", &MpsState::max_bond)
      .def("to_dense", [](const MpsState& s) { return dense_from_mps(s); });

  m.def("build", &build, py::arg("spec"));
  m.def("build_mps", &build_mps, py::arg("spec"));
  m.def("perturb", &perturb, py::arg("state"), py::arg("delta"), py::arg("seed"));
  m.def("mps_from_dense", &mps_from_dense, py::arg("state"), py::arg("tol") = 0.0);
  m.def(
      "reduced_density_matrix",
      [](const DenseState& s, int first, int k) { return Matrix(reduced_density_matrix(s, first, k).entries()); },
      py::arg("state"), py::arg("first"), py::arg("k"));
  m.def("schmidt_spectrum", py::overload_cast<const DenseState&, int>(&schmidt_spectrum), py::arg("state"),
        py::arg("cut"));

  py::enum_<NoiseMode>(m, "NoiseMode")
      .value("EXACT", NoiseMode::Exact)
      .value("SUBSPACE_PERTURBATION", NoiseMode::SubspacePerturbation)
      .value("SHOTS", NoiseMode::Shots);

  py::enum_<BoundaryGauge>(m, "BoundaryGauge")
      .value("SCHMIDT", BoundaryGauge::Schmidt)
      .value("EIGEN", BoundaryGauge::Eigen);

  py::class_<NoiseConfig>(m, "NoiseConfig")
      .def(py::init<>())
      .def_readwrite("mode", &NoiseConfig::mode)
      .def_readwrite("epsilon", &NoiseConfig::epsilon)
      .def_readwrite("shots", &NoiseConfig::shots)
      .def_readwrite("seed", &NoiseConfig::seed);

  py::class_<ProtocolConfig>(m, "ProtocolConfig")
      .def(py::init([](int chi, std::optional<int> k) {
             ProtocolConfig c;
             c.chi = chi;
             c.k = k;
             return c;
           }),
           py::arg("chi") = 1, py::arg("k") = py::none())
      .def_readwrite("chi", &ProtocolConfig::chi)
      .def_readwrite("k", &ProtocolConfig::k)
      .def_readwrite("noise", &ProtocolConfig::noise)
      .def_readwrite("truncation_abort_threshold", &ProtocolConfig::truncation_abort_threshold)
      .def_readwrite("boundary_gauge", &ProtocolConfig::boundary_gauge)
      .def_readwrite("bond_cap", &ProtocolConfig::bond_cap)
      .def_readwrite("gauge_seed", &ProtocolConfig::gauge_seed)
      .def("resolved_k", &ProtocolConfig::resolved_k, py::arg("d"), py::arg("n"));

  py::class_<TruncationLog>(m, "TruncationLog")
      .def_readonly("expected_steps", &TruncationLog::expected_steps)
      .def_property_readonly("probabilities", &probabilities)
      .def("total_error", &TruncationLog::total_error);

  py::class_<TomographyResult>(m, "TomographyResult")
      .def_readonly("n", &TomographyResult::n)
      .def_readonly("d", &TomographyResult::d)
      .def_readonly("k", &TomographyResult::k)
      .def_readonly("eta", &TomographyResult::eta)
      .def_readonly("log", &TomographyResult::log)
      .def_readonly("windows", &TomographyResult::windows)
      .def_readonly("settings_per_window", &TomographyResult::settings_per_window)
      .def_property_readonly("measurement_settings", &TomographyResult::measurement_settings)
      .def_property_readonly("probabilities", [](const TomographyResult& r) { return probabilities(r.log); })
      .def_property_readonly("disentanglers", [](const TomographyResult& r) {
        std::vector<Matrix> out;
        for (const auto& dis : r.disentanglers) out.push_back(dis.matrix);
        return out;
      });

  m.def("run_protocol", &run_protocol, py::arg("state"), py::arg("config"));
  m.def("run_protocol_mps", &run_protocol_mps, py::arg("state"), py::arg("config"));

  py::class_<ExtractedTensors>(m, "ExtractedTensors")
      .def_readonly("n", &ExtractedTensors::n)
      .def_readonly("d", &ExtractedTensors::d)
      .def_readonly("k", &ExtractedTensors::k)
      .def_readonly("t", &ExtractedTensors::t)
      .def_readonly("v", &ExtractedTensors::v)
      .def_readonly("eta", &ExtractedTensors::eta);

  m.def("extract_tensors", &extract_tensors, py::arg("result"));
  m.def("extract_T", &extract_T, py::arg("k"), py::arg("d"));
  m.def("extract_V", &extract_V, py::arg("u"), py::arg("d"), py::arg("k"));
  m.def(
      "amplitude", [](const ExtractedTensors& t, const std::string& digits) { return amplitude(t, digits); },
      py::arg("tensors"), py::arg("digits"));
  m.def("to_mps", &to_mps, py::arg("tensors"), py::arg("recompress_tol") = py::none());
  m.def("fidelity", py::overload_cast<const DenseState&, const DenseState&>(&fidelity));
  m.def("fidelity", py::overload_cast<const DenseState&, const MpsState&>(&fidelity));
  m.def("fidelity", py::overload_cast<const MpsState&, const DenseState&>(&fidelity));
  m.def("fidelity", py::overload_cast<const MpsState&, const MpsState&>(&fidelity));

  py::class_<Certificate>(m, "Certificate")
      .def_readonly("step_errors", &Certificate::step_errors)
      .def_readonly("cumulative_bound", &Certificate::cumulative_bound)
      .def_readonly("threshold", &Certificate::threshold)
      .def_readonly("accepted", &Certificate::accepted);
  m.def(
      "certify", [](const TomographyResult& r, double threshold) { return certify(r.log, threshold, r.config.noise); },
      py::arg("result"), py::arg("threshold"));

  py::class_<BoundTrial>(m, "BoundTrial")
      .def_readonly("seed", &BoundTrial::seed)
      .def_readonly("distance", &BoundTrial::distance)
      .def_readonly("ratio", &BoundTrial::ratio)
      .def_readonly("deviation", &BoundTrial::deviation);
  py::class_<BoundReport>(m, "BoundReport")
      .def_readonly("n", &BoundReport::n)
      .def_readonly("epsilon", &BoundReport::epsilon)
      .def_readonly("trials", &BoundReport::trials)
      .def_readonly("max_ratio", &BoundReport::max_ratio)
      .def_readonly("median_distance", &BoundReport::median_distance)
      .def_readonly("mean_deviation", &BoundReport::mean_deviation);
  m.def("check_error_bound", &check_error_bound, py::arg("n"), py::arg("epsilon"), py::arg("trials"),
        py::arg("seed"), py::arg("chi") = 2);

  m.def("_run_command", &run_command, py::arg("command"), py::arg("config_json"), py::arg("family") = "ghz");
  m.def("_check_record", &check_record_text, py::arg("record_json"));
}
