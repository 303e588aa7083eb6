// Python bindings for the solver library: problem construction, field
// evaluation, residuals, constant estimators, and the configured runner.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "interp_solve/runner.hpp"

namespace py = pybind11;
namespace is = interp_solve;

namespace {

is::ProblemSpec make_problem(const std::string& name, py::kwargs kwargs) {
  is::RunConfig cfg;
  cfg.problem = name;
  for (auto item : kwargs) {
    const std::string key = py::cast<std::string>(item.first);
    const double value = py::cast<double>(item.second);
    if (key == "a") cfg.a = value;
    else if (key == "b") cfg.b = value;
    else if (key == "L") cfg.L = value;
    else if (key == "rho") cfg.rho = value;
    else throw is::ParameterError("unknown problem constant: " + key);
  }
  return is::build_problem(cfg);
}

py::dict trajectory_dict(const is::RunResult& result) {
  py::dict out;
  out["problem"] = result.problem.name;
  out["iterates"] = result.trajectory.iterates;
  out["oracle_calls"] = result.trajectory.oracle_calls;
  out["residuals"] = result.residuals.values;
  out["residual_kind"] = is::to_string(result.residuals.kind);
  out["gamma"] = result.residuals.gamma;
  out["dist_to_zero"] = result.dist_to_zero;
  out["stop_reason"] = is::to_string(result.trajectory.stop_reason);
  out["warnings"] = result.trajectory.warnings;
  out["diverged"] = result.diverged;
  if (result.diverged) out["divergence_message"] = result.divergence_message;
  py::dict bounds;
  for (const auto& rep : result.reports) {
    py::dict b;
    b["applicable"] = rep.applicable;
    b["all_satisfied"] = rep.all_satisfied();
    if (!rep.reason.empty()) b["reason"] = rep.reason;
    bounds[py::str(rep.name)] = b;
  }
  out["bounds"] = bounds;
  return out;
}

}  // namespace

PYBIND11_MODULE(interp_solve, m) {
  m.doc() = "solvers and diagnostics for structured inclusions 0 in Az + Fz";

  py::register_exception<is::Error>(m, "SolveError");

  py::class_<is::ProblemSpec>(m, "Problem")
      .def_property_readonly("name", [](const is::ProblemSpec& p) { return p.name; })
      .def_property_readonly("dim", &is::ProblemSpec::dim)
      .def_property_readonly("constrained", &is::ProblemSpec::constrained)
      .def_property_readonly("constants", [](const is::ProblemSpec& p) { return p.constants; })
      .def_property_readonly("known_zero", [](const is::ProblemSpec& p) { return p.known_zero; })
      .def_property_readonly("lipschitz",
                             [](const is::ProblemSpec& p) { return p.field.lipschitz; })
      .def_property_readonly("comonotonicity",
                             [](const is::ProblemSpec& p) { return p.field.comonotonicity; })
      .def_property_readonly("annotation", [](const is::ProblemSpec& p) { return p.annotation; })
      .def("field", [](const is::ProblemSpec& p, const is::Point& z) { return p.field.eval(z); },
           py::arg("z"), "evaluate F(z)")
      .def("project",
           [](const is::ProblemSpec& p, const is::Point& z) { return p.resolvent.apply(1.0, z); },
           py::arg("z"), "project onto the constraint set (identity when unconstrained)")
      .def(
          "residual",
          [](const is::ProblemSpec& p, const is::Point& z, double gamma, const std::string& kind) {
            const is::ResidualKind k = kind == "auto" ? is::default_residual_kind(p)
                                                      : is::residual_kind_from_string(kind);
            return is::residual(p, z, gamma, k);
          },
          py::arg("z"), py::arg("gamma"), py::arg("kind") = "auto")
      .def("__repr__", [](const is::ProblemSpec& p) {
        return "<Problem " + p.name + " dim=" + std::to_string(p.dim()) + ">";
      });

  m.def("problem", &make_problem, py::arg("name"),
        "build a named problem (quadratic|polar|forsaken|lne-forsaken) with constant overrides");
  m.def("quadratic", [](double a, double b) { return is::quadratic_field(a, b); }, py::arg("a"),
        py::arg("b"));
  m.def("quadratic_from_constants",
        [](double L, double rho) { return is::quadratic_from_constants(L, rho); }, py::arg("L"),
        py::arg("rho"));
  m.def("polar", [](double a) { return is::polar_game_field(a); }, py::arg("a") = 1.0 / 3.0);
  m.def("forsaken", [](double a) { return is::forsaken_field(a); }, py::arg("a") = 0.45);

  m.def("estimate_lipschitz",
        [](const is::ProblemSpec& p, std::size_t samples, std::uint64_t seed) {
          return is::estimate_lipschitz(p, samples, seed);
        },
        py::arg("problem"), py::arg("samples") = 1000, py::arg("seed") = 0);
  m.def("estimate_comonotonicity",
        [](const is::ProblemSpec& p, std::size_t samples, std::uint64_t seed) {
          return is::estimate_comonotonicity(p, samples, seed);
        },
        py::arg("problem"), py::arg("samples") = 1000, py::arg("seed") = 0);
  m.def("estimate_star_rho",
        [](const is::ProblemSpec& p, std::size_t samples, std::uint64_t seed) {
          return is::estimate_star_rho(p, samples, seed);
        },
        py::arg("problem"), py::arg("samples") = 1000, py::arg("seed") = 0);

  m.def(
      "solve",
      [](const std::string& problem, const std::string& solver, py::object gamma, double lambda,
         double alpha, long tau, long iterations, double sigma0, const std::string& batch_mode,
         std::uint64_t batch_n, std::uint64_t seed, bool strict, py::object target,
         py::object max_oracle_calls, const std::string& z0, const std::string& residual,
         const std::vector<std::string>& checks, py::kwargs kwargs) {
        is::RunConfig cfg;
        cfg.problem = problem;
        cfg.solver = solver;
        for (auto item : kwargs) {
          const std::string key = py::cast<std::string>(item.first);
          const double value = py::cast<double>(item.second);
          if (key == "a") cfg.a = value;
          else if (key == "b") cfg.b = value;
          else if (key == "L") cfg.L = value;
          else if (key == "rho") cfg.rho = value;
          else throw is::ParameterError("unknown problem constant: " + key);
        }
        if (py::isinstance<py::str>(gamma)) {
          if (py::cast<std::string>(gamma) != "auto") {
            throw is::ParameterError("gamma must be a number or 'auto'");
          }
          cfg.gamma_auto = true;
        } else {
          cfg.params.gamma = py::cast<double>(gamma);
        }
        cfg.params.lambda = lambda;
        cfg.params.alpha = alpha;
        cfg.params.tau = tau;
        cfg.params.iterations = iterations;
        cfg.params.sigma0 = sigma0;
        cfg.batch_mode = batch_mode;
        cfg.params.batch_n = batch_n;
        cfg.params.seed = seed;
        cfg.params.strict = strict;
        if (!target.is_none()) cfg.params.target_residual = py::cast<double>(target);
        if (!max_oracle_calls.is_none()) {
          cfg.params.max_oracle_calls = py::cast<std::uint64_t>(max_oracle_calls);
        }
        cfg.z0 = z0;
        cfg.residual_kind = residual;
        cfg.checks = checks;
        return trajectory_dict(is::run_experiment(cfg));
      },
      py::arg("problem") = "quadratic", py::arg("solver") = "eg", py::arg("gamma") = 0.5,
      py::arg("lambda") = 0.5, py::arg("alpha") = 0.5, py::arg("tau") = 1,
      py::arg("iterations") = 100, py::arg("sigma0") = 0.0, py::arg("batch_mode") = "fixed",
      py::arg("batch_n") = 1, py::arg("seed") = 0, py::arg("strict") = true,
      py::arg("target") = py::none(), py::arg("max_oracle_calls") = py::none(),
      py::arg("z0") = "default", py::arg("residual") = "auto",
      py::arg("checks") = std::vector<std::string>{},
      "run one configured experiment and return the trajectory as a dict");
}
