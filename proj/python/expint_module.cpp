#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "expint/analysis.hpp"
#include "expint/config.hpp"
#include "expint/errors.hpp"
#include "expint/integrators.hpp"
#include "expint/operators.hpp"
#include "expint/phi.hpp"
#include "expint/problems.hpp"

namespace py = pybind11;
using namespace expint;

namespace {

Command parse_command(const std::string& name) {
  if (name == "converge") return Command::converge;
  if (name == "defect") return Command::defect;
  if (name == "solve") return Command::solve;
  throw ConfigError("unknown command '" + name + "'");
}

py::dict fit_to_dict(const FitResult& fit) {
  py::dict d;
  d["order"] = fit.order;
  d["r2"] = fit.r2;
  d["residual"] = fit.residual;
  d["points"] = fit.points;
  return d;
}

NormKind make_norm(const std::string& kind, double exponent, int samples, std::uint64_t seed) {
  if (kind == "max") return NormKind::max_norm();
  if (kind == "c1") return NormKind::c1_discrete();
  if (kind == "holder") return NormKind::holder(exponent, samples, seed);
  throw ConfigError("unknown norm '" + kind + "'");
}

py::dict run_study(const std::string& text, int threads) {
  const ExperimentConfig config = parse_config(text, Command::converge);
  const Problem problem = build_problem(config.problem);
  StudyOptions options;
  options.threads = threads;
  ConvergenceReport report;
  {
    py::gil_scoped_release release;
    report = run_convergence_study(problem, config.scheme, config.study.taus, config.study.T,
                                   config.study.norms, config.study.reference, options);
  }
  py::dict out;
  out["problem"] = report.problem;
  out["scheme"] = report.scheme;
  out["taus"] = report.taus;
  out["reference"] = report.reference;
  out["divergence_step"] = report.divergence_step;
  py::dict norms;
  for (const auto& s : report.norms) {
    py::dict series;
    series["errors"] = s.errors;
    series["fit"] = s.fit ? py::object(fit_to_dict(*s.fit)) : py::none();
    series["flag"] = s.flag;
    norms[py::str(s.kind.name())] = series;
  }
  out["norms"] = norms;
  out["config_hash"] = config_hash(config);
  return out;
}

State solve_config(const std::string& text) {
  const ExperimentConfig config = parse_config(text, Command::solve);
  const Problem problem = build_problem(config.problem);
  const Stepper stepper = make_stepper(config.scheme, problem, config.solve.tau);
  py::gil_scoped_release release;
  return integrate(stepper, problem, config.solve.T).state;
}

}  // namespace

PYBIND11_MODULE(_expint, m) {
  m.doc() = "Exponential integrators for semilinear parabolic problems";
  m.attr("__version__") = EXPINT_VERSION;
  m.attr("K_MAX") = kMaxPhiOrder;

  auto base = py::register_exception<Error>(m, "ExpintError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<ReferenceScaleError>(m, "ReferenceScaleError", base.ptr());
  py::register_exception<OracleConvergenceError>(m, "OracleConvergenceError", base.ptr());
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());
  py::register_exception<NoiseFloorError>(m, "NoiseFloorError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

  m.def("phi", &phi_scalar, py::arg("k"), py::arg("z"), "phi_k(z) for a real scalar");
  m.def("phi_oracle", &phi_quadrature_oracle, py::arg("k"), py::arg("z"), py::arg("tol") = 1e-14,
        "Adaptive quadrature of the defining integral (absolute tolerance)");
  m.def("phi_dense", &phi_dense, py::arg("k"), py::arg("t"), py::arg("a"),
        "phi_k(tA) for a dense square matrix");

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, int>(), py::arg("dims"), py::arg("N"))
      .def_property_readonly("dims", &Grid::dims)
      .def_property_readonly("N", &Grid::subintervals)
      .def_property_readonly("h", &Grid::h)
      .def_property_readonly("size", &Grid::size)
      .def("__repr__", [](const Grid& g) {
        return "Grid(dims=" + std::to_string(g.dims()) + ", N=" + std::to_string(g.subintervals()) + ")";
      });

  py::class_<SpectralOperator>(m, "SpectralOperator")
      .def_property_readonly("grid", &SpectralOperator::grid)
      .def_property_readonly("diffusivity", &SpectralOperator::diffusivity)
      .def_property_readonly("size", &SpectralOperator::size)
      .def_property_readonly("eigenvalues", &SpectralOperator::eigenvalues)
      .def("apply", &SpectralOperator::apply, py::arg("v"))
      .def("to_dense", [](const SpectralOperator& op) { return to_dense(op); });

  py::class_<SplitOperator>(m, "SplitOperator")
      .def_readonly("a1", &SplitOperator::a1)
      .def_readonly("a2", &SplitOperator::a2)
      .def_readonly("full", &SplitOperator::full);

  m.def("laplacian_1d", [](int n, double nu) { return laplacian_1d_dirichlet(n, nu); },
        py::arg("N"), py::arg("nu") = 1.0);
  m.def("split_laplacian_2d", [](int n, double nu) { return split_laplacian_2d(n, nu); },
        py::arg("N"), py::arg("nu") = 1.0);
  m.def("phi_apply", &phi_apply_spectral, py::arg("k"), py::arg("t"), py::arg("op"), py::arg("v"),
        "phi_k(tA)v through the operator's sine basis");

  m.def(
      "initial_data",
      [](const std::string& kind, const Grid& grid, double gamma, std::uint64_t seed) {
        InitialDataSpec spec;
        spec.kind = parse_initial_kind(kind);
        spec.gamma = gamma;
        spec.seed = seed;
        return make_initial_data(spec, grid);
      },
      py::arg("kind"), py::arg("grid"), py::arg("gamma") = 0.5, py::arg("seed") = 1);

  m.def(
      "norm",
      [](const State& v, const Grid& grid, const std::string& kind, double exponent, int samples,
         std::uint64_t seed) { return norm(v, make_norm(kind, exponent, samples, seed), grid); },
      py::arg("v"), py::arg("grid"), py::arg("kind") = "max", py::arg("exponent") = 1.0,
      py::arg("samples") = 2000, py::arg("seed") = 1);

  m.def(
      "fit_order",
      [](const std::vector<double>& taus, const std::vector<double>& errors) {
        return fit_to_dict(fit_order(taus, errors));
      },
      py::arg("taus"), py::arg("errors"), "Least-squares fit of error = C tau^p");

  m.def("split_defect", &split_defect_norm, py::arg("op"), py::arg("k"), py::arg("t"), py::arg("v"),
        "Relative max-norm split defect at time t");

  m.def(
      "config_hash",
      [](const std::string& text, const std::string& command) {
        return config_hash(parse_config(text, parse_command(command)));
      },
      py::arg("text"), py::arg("command") = "converge");
  m.def(
      "echo_config",
      [](const std::string& text, const std::string& command) {
        return echo_config(parse_config(text, parse_command(command)));
      },
      py::arg("text"), py::arg("command") = "converge");

  m.def("run_study", &run_study, py::arg("config_text"), py::arg("threads") = 1,
        "Run a convergence study described by config text");
  m.def("solve", &solve_config, py::arg("config_text"),
        "Integrate the solve config and return the final state");
}
