#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "monret/analysis.hpp"
#include "monret/cli.hpp"
#include "monret/errors.hpp"
#include "monret/superoperator.hpp"
#include "monret/trajectory.hpp"
#include "monret/two_level.hpp"
#include "monret/winding.hpp"

namespace py = pybind11;
using namespace monret;

PYBIND11_MODULE(_monret, m) {
  m.doc() = "First detected return statistics under random-time monitoring";

  static py::exception<Error> base_error(m, "MonretError");
  static py::exception<InvalidInput> invalid_input(m, "InvalidInput", PyExc_ValueError);
  static py::exception<ResonanceError> resonance(m, "ResonanceError", base_error.ptr());
  static py::exception<NumericalHealthError> health(m, "NumericalHealthError", base_error.ptr());
  static py::exception<UndefinedWinding> undefined(m, "UndefinedWinding", health.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidInput& e) {
      py::set_error(invalid_input, e.what());
    } catch (const ResonanceError& e) {
      py::set_error(resonance, e.what());
    } catch (const UndefinedWinding& e) {
      py::set_error(undefined, e.what());
    } catch (const NumericalHealthError& e) {
      py::set_error(health, e.what());
    } catch (const Error& e) {
      py::set_error(base_error, e.what());
    }
  });

  py::class_<CanonicalSpectralModel>(m, "SpectralModel")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("energies"), py::arg("weights"))
      .def_property_readonly("energies", &CanonicalSpectralModel::energies)
      .def_property_readonly("weights", &CanonicalSpectralModel::weights)
      .def_property_readonly("dimension", &CanonicalSpectralModel::dimension)
      .def("__repr__", [](const CanonicalSpectralModel& s) {
        return "SpectralModel(N=" + std::to_string(s.dimension()) + ")";
      });

  m.def(
      "canonicalize",
      [](const std::vector<double>& energies, const std::vector<double>& weights, double tol,
         double floor) {
        if (energies.size() != weights.size()) throw InvalidInput("energies and weights differ in length");
        std::vector<Level> levels;
        for (std::size_t i = 0; i < energies.size(); ++i) levels.push_back({energies[i], weights[i]});
        return canonicalize(RawSpectralModel(std::move(levels)), tol, floor);
      },
      py::arg("energies"), py::arg("weights"), py::arg("degeneracy_tol") = kDefaultDegeneracyTol,
      py::arg("weight_floor") = kDefaultWeightFloor);
  m.def(
      "from_hamiltonian",
      [](const Eigen::MatrixXcd& h, const Eigen::VectorXcd& psi, double tol, double floor) {
        return canonicalize(spectral_decompose({h, psi}), tol, floor);
      },
      py::arg("hamiltonian"), py::arg("initial_state"), py::arg("degeneracy_tol") = kDefaultDegeneracyTol,
      py::arg("weight_floor") = kDefaultWeightFloor);
  m.def("two_level_model", &two_level_model, py::arg("J"));

  py::class_<TimeDistribution>(m, "TimeDistribution")
      .def_static("fixed", [](double tau) { return TimeDistribution(Fixed{tau}); }, py::arg("tau"))
      .def_static("exponential", [](double rate) { return TimeDistribution(Exponential{rate}); },
                  py::arg("rate"))
      .def_static("uniform", [](double a, double b) { return TimeDistribution(Uniform{a, b}); },
                  py::arg("a"), py::arg("b"))
      .def_static("gamma", [](double k, double rate) { return TimeDistribution(Gamma{k, rate}); },
                  py::arg("shape"), py::arg("rate"))
      .def("char_fn", &TimeDistribution::char_fn, py::arg("z"))
      .def("mean", &TimeDistribution::mean)
      .def("sample", [](const TimeDistribution& d, std::uint64_t seed, std::size_t n) {
        RandomStream rng(seed);
        std::vector<double> out(n);
        for (auto& v : out) v = d.sample(rng);
        return out;
      }, py::arg("seed"), py::arg("n"))
      .def("__repr__", &TimeDistribution::describe);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("taus", &Trajectory::taus)
      .def_readonly("amplitudes", &Trajectory::amplitudes)
      .def_readonly("survival", &Trajectory::survival)
      .def_readonly("detection_probs", &Trajectory::detection_probs);
  m.def("amplitudes_for", [](const CanonicalSpectralModel& model, const std::vector<double>& taus) {
    return amplitudes_for(model, taus);
  }, py::arg("model"), py::arg("taus"));
  m.def("sample_trajectory", [](const CanonicalSpectralModel& model, const TimeDistribution& d,
                                std::uint64_t seed, std::size_t steps) {
    RandomStream rng(seed);
    return sample_trajectory(model, d, rng, steps);
  }, py::arg("model"), py::arg("dist"), py::arg("seed"), py::arg("steps"));
  m.def("truncated_ft", [](const Trajectory& tr, const std::vector<double>& grid) {
    return truncated_ft(tr, grid);
  }, py::arg("trajectory"), py::arg("omega"));

  py::class_<FirstDetectionStats>(m, "FirstDetectionStats")
      .def_readonly("seed", &FirstDetectionStats::seed)
      .def_readonly("samples", &FirstDetectionStats::samples)
      .def_readonly("censored", &FirstDetectionStats::censored)
      .def_readonly("histogram", &FirstDetectionStats::histogram)
      .def_property_readonly("moments_k", [](const FirstDetectionStats& s) {
        std::vector<std::pair<double, double>> out;
        for (const auto& e : s.moments_k) out.emplace_back(e.mean, e.std_error);
        return out;
      })
      .def_property_readonly("moments_t", [](const FirstDetectionStats& s) {
        std::vector<std::pair<double, double>> out;
        for (const auto& e : s.moments_t) out.emplace_back(e.mean, e.std_error);
        return out;
      });
  m.def("estimate_first_detection",
        [](const CanonicalSpectralModel& model, const TimeDistribution& d, std::uint64_t seed,
           std::int64_t samples, std::int64_t k_max, int threads, int max_order) {
          MonteCarloOptions o;
          o.seed = seed;
          o.samples = samples;
          o.k_max = k_max;
          o.threads = threads;
          o.max_order = max_order;
          py::gil_scoped_release release;
          return estimate_first_detection(model, d, o);
        },
        py::arg("model"), py::arg("dist"), py::arg("seed"), py::arg("samples") = 100000,
        py::arg("k_max") = kDefaultMaxMeasurements, py::arg("threads") = 0, py::arg("max_order") = 2);

  m.def("gamma_matrix", [](const CanonicalSpectralModel& model, const TimeDistribution& d) {
    return build(model, d).gamma();
  }, py::arg("model"), py::arg("dist"));
  m.def("spectral_radius", [](const CanonicalSpectralModel& model, const TimeDistribution& d) {
    return spectral_radius(build(model, d));
  }, py::arg("model"), py::arg("dist"));
  m.def("return_probabilities", [](const CanonicalSpectralModel& model, const TimeDistribution& d,
                                   std::size_t K) { return return_probabilities(build(model, d), K); },
        py::arg("model"), py::arg("dist"), py::arg("K"));
  m.def("correlator_matrix", [](const CanonicalSpectralModel& model, const TimeDistribution& d,
                                std::size_t K) { return correlator_matrix(build(model, d), K); },
        py::arg("model"), py::arg("dist"), py::arg("K"));
  m.def("identity_residuals", [](const CanonicalSpectralModel& model, const TimeDistribution& d) {
    const auto r = verify_identities(build(model, d));
    return py::dict(py::arg("weighted_column_sums") = r.weighted_column_sums,
                    py::arg("row_sums") = r.row_sums, py::arg("rcond") = r.rcond);
  }, py::arg("model"), py::arg("dist"));

  m.def("generating_F", py::overload_cast<const CanonicalSpectralModel&, const TimeDistribution&, double>(&generating_F),
        py::arg("model"), py::arg("dist"), py::arg("omega"));
  m.def("generating_F_tau", &generating_F_tau, py::arg("model"), py::arg("dist"), py::arg("omega"));
  m.def("mean_k", py::overload_cast<const CanonicalSpectralModel&, const TimeDistribution&>(&mean_k),
        py::arg("model"), py::arg("dist"));
  m.def("mean_t", &mean_t, py::arg("model"), py::arg("dist"));
  m.def("moment", &moment, py::arg("model"), py::arg("dist"), py::arg("m"),
        py::arg("rel_tol") = kDefaultMomentRelTol);
  m.def("stroboscopic_phi", &stroboscopic_phi, py::arg("model"), py::arg("tau"), py::arg("omega"));

  py::class_<WindingResult>(m, "WindingResult")
      .def_readonly("winding", &WindingResult::winding)
      .def_readonly("value", &WindingResult::value)
      .def_readonly("residual", &WindingResult::residual)
      .def_property_readonly("method", [](const WindingResult& r) { return to_string(r.method); })
      .def("__repr__", [](const WindingResult& r) {
        std::ostringstream os;
        os << "WindingResult(" << r.winding << ", " << to_string(r.method) << ")";
        return os.str();
      });
  m.def("winding_from_samples", [](const std::vector<Complex>& s) { return winding_from_samples(s); },
        py::arg("samples"));
  m.def("winding_poly", [](const std::vector<Complex>& c) { return winding_poly(c); }, py::arg("coeffs"));
  m.def("trajectory_winding", &trajectory_winding, py::arg("trajectory"),
        py::arg("initial_points") = kDefaultWindingGrid);
  m.def("averaged_winding", &averaged_winding, py::arg("model"), py::arg("dist"));
  m.def("correlator_winding", &correlator_winding, py::arg("model"), py::arg("dist"),
        py::arg("omega_points") = 128, py::arg("K_trunc") = 0, py::arg("fd_step") = 1e-3);

  m.def("two_level_F", [](double J, const TimeDistribution& d, double w) {
    return closed_F(TwoLevelParams(J, d), w);
  }, py::arg("J"), py::arg("dist"), py::arg("omega"));
  m.def("two_level_second_moment", [](double J, const TimeDistribution& d) {
    return second_moment_closed(TwoLevelParams(J, d));
  }, py::arg("J"), py::arg("dist"));
  m.def("two_level_phi", [](double J, const std::vector<double>& taus) {
    return phi_k_closed(TwoLevelParams(J, Exponential{1.0}), taus);
  }, py::arg("J"), py::arg("taus"));

  m.def("run_cli", [](const std::string& cmd, const std::string& config_json, const std::string& out_dir,
                      std::optional<std::uint64_t> seed, int threads) -> py::tuple {
    cli::Options o;
    o.seed = seed;
    o.threads = threads;
    o.quiet = true;
    std::ostringstream out, err;
    Json config;
    try {
      config = Json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      return py::make_tuple(static_cast<int>(cli::kSchemaError), std::string(), std::string(e.what()));
    }
    const int code = cli::run(cmd, config, out_dir, o, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("command"), py::arg("config_json"), py::arg("out_dir"), py::arg("seed") = py::none(),
     py::arg("threads") = 0);
}
