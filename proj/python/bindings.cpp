#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "opreg/baselines.hpp"
#include "opreg/bench.hpp"
#include "opreg/cvxreg.hpp"
#include "opreg/interp.hpp"
#include "opreg/opreg.hpp"
#include "opreg/qcqp.hpp"

namespace py = pybind11;
using namespace opreg;

namespace {

py::dict diagnostics_dict(const PrsDiagnostics& d) {
  py::dict out;
  out["iterations"] = d.iterations;
  out["residual"] = d.residual;
  out["max_violation"] = d.max_violation;
  out["objective"] = d.objective;
  out["converged"] = d.converged;
  return out;
}

py::dict traces_dict(const std::vector<bench::RunTrace>& traces) {
  py::dict out;
  for (const auto& t : traces) {
    py::dict d;
    d["tracking_error"] = t.errors();
    std::vector<std::uint64_t> calls;
    for (const auto& r : t.rows) calls.push_back(r.calls);
    d["calls"] = calls;
    d["asymptotic_error"] = bench::asymptotic_error(t.errors());
    d["mean_step_time_s"] = t.mean_step_time_s();
    d["failed_steps"] = t.failures();
    out[py::str(t.solver)] = d;
  }
  return out;
}

BoostConfig boost_config(Index ell, double zeta, double rho, int max_iter, std::uint64_t seed) {
  BoostConfig b;
  b.ell = ell;
  b.zeta = zeta;
  b.rho = rho;
  b.stop.max_iterations = max_iter;
  b.rng_seed = seed;
  return b;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Operator-regression boosting: contractive fits, interpolation and online benchmarks.";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> non_convergence;
  non_convergence.call_once_and_store_result([&]() {
    return py::exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);
  });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NonConvergence& e) {
      py::set_error(non_convergence.get_stored(), e.what());
    } catch (const InvalidArgument& e) {
      py::set_error(PyExc_ValueError, e.what());
    } catch (const DegenerateInput& e) {
      py::set_error(PyExc_ValueError, e.what());
    } catch (const EvaluationError& e) {
      py::set_error(PyExc_FloatingPointError, e.what());
    }
  });

  m.def(
      "opreg_fit",
      [](const Matrix& points, const Matrix& evaluations, double zeta, double rho, int max_iter,
         double tol, Index distinguished) {
        RegressionDataset data{points, evaluations, distinguished};
        const auto r = opreg_fit(data, zeta, rho, {max_iter, tol});
        py::dict out = diagnostics_dict(r.diagnostics);
        out["values"] = r.fit.values;
        out["boosted"] = extract_boosted_value(r.fit, data);
        return out;
      },
      py::arg("points"), py::arg("evaluations"), py::arg("zeta"), py::arg("rho") = 1.0,
      py::arg("max_iter") = 100, py::arg("tol") = 1e-8, py::arg("distinguished") = 0,
      "Least-squares projection of T(x_i) (columns) onto zeta-contractive data.");

  m.def(
      "cvxreg_fit",
      [](const Matrix& points, const Vector& values, const Matrix& gradients, double mu, double L,
         double rho, int max_iter, double tol) {
        CvxRegDataset data{points, values, gradients};
        const auto r = cvxreg_fit(data, {mu, L}, rho, {max_iter, tol});
        py::dict out = diagnostics_dict(r.diagnostics);
        out["values"] = r.fit.values;
        out["gradients"] = r.fit.gradients;
        return out;
      },
      py::arg("points"), py::arg("values"), py::arg("gradients"), py::arg("mu"), py::arg("L"),
      py::arg("rho") = 1.0, py::arg("max_iter") = 100, py::arg("tol") = 1e-8);

  m.def(
      "interpolate",
      [](const Matrix& fitted, const Matrix& anchors, double zeta, const Vector& query,
         std::optional<Vector> start, double theta, int max_sweeps) {
        ContractiveEvaluations fit{fitted, zeta, 0.0};
        interp::MapOptions options;
        options.theta = theta;
        options.max_sweeps = max_sweeps;
        options.start = std::move(start);
        const auto r = interp::interpolate(fit, anchors, query, options);
        py::dict out;
        out["value"] = r.value;
        out["sweeps"] = r.sweeps;
        out["max_violation"] = r.max_violation;
        return out;
      },
      py::arg("fitted"), py::arg("anchors"), py::arg("zeta"), py::arg("query"),
      py::arg("start") = py::none(), py::arg("theta") = 1e-9, py::arg("max_sweeps") = 500,
      "Contractive extension of fitted values to a new query point.");

  m.def(
      "project_pair",
      [](const Vector& w_i, const Vector& w_j, double radius) {
        Vector t_i(w_i.size()), t_j(w_j.size());
        const double lambda = qcqp::project_pair(w_i, w_j, radius, t_i, t_j);
        return py::make_tuple(t_i, t_j, lambda);
      },
      py::arg("w_i"), py::arg("w_j"), py::arg("radius"),
      "Closest (t_i, t_j) with ||t_i - t_j|| <= radius; returns (t_i, t_j, multiplier).");

  m.def(
      "prox_linear_step",
      [](const Matrix& A, const Vector& b, double alpha, const Vector& y) {
        return prox_linear_step(A, b, alpha, y);
      },
      py::arg("A"), py::arg("b"), py::arg("alpha"), py::arg("y"));

  m.def(
      "bench_lasso",
      [](Index n, double L, double mu, std::size_t horizon, std::uint64_t seed, double zeta,
         double rho, Index ell, int max_iter, bool interp) {
        bench::LassoStreamSpec spec;
        spec.n = n;
        spec.L = L;
        spec.mu = mu;
        spec.horizon = horizon;
        spec.seed = seed;
        const bench::LassoStream stream(spec);
        const BoostConfig boost = boost_config(ell, zeta, rho, max_iter, seed);
        auto solvers = bench::lasso_solvers(stream.default_step(), 1.0 / L, boost);
        if (interp) {
          bench::SolverSpec s;
          s.kind = bench::SolverKind::kOpRegBoostInterpolated;
          s.alpha = stream.default_step();
          s.boost = boost;
          solvers.push_back(s);
        }
        std::vector<bench::RunTrace> traces;
        {
          py::gil_scoped_release release;
          traces = bench::run_experiment(stream, solvers, bench::BudgetRule{ell});
        }
        return traces_dict(traces);
      },
      py::arg("n") = 100, py::arg("L") = 1e8, py::arg("mu") = 1.0, py::arg("horizon") = 500,
      py::arg("seed") = 1, py::arg("zeta") = 0.9, py::arg("rho") = 1e-6, py::arg("ell") = 3,
      py::arg("max_iter") = 100, py::arg("interp") = false,
      "Online lasso benchmark; returns {solver: {tracking_error, calls, asymptotic_error, ...}}.");

  m.def(
      "bench_phase",
      [](int pieces, std::size_t horizon, std::uint64_t seed, double zeta, double rho, Index ell,
         int max_iter, bool linear_measurements) {
        bench::PhaseStreamSpec spec;
        spec.pieces = pieces;
        spec.horizon = horizon;
        spec.seed = seed;
        spec.linear_measurements = linear_measurements;
        const bench::PhaseStream stream(spec);
        bench::BudgetRule budget;
        budget.ell = ell;
        const auto solvers =
            bench::phase_solvers(spec.alpha, boost_config(ell, zeta, rho, max_iter, seed));
        std::vector<bench::RunTrace> traces;
        {
          py::gil_scoped_release release;
          traces = bench::run_experiment(stream, solvers, budget);
        }
        return traces_dict(traces);
      },
      py::arg("pieces") = 1, py::arg("horizon") = 100, py::arg("seed") = 1, py::arg("zeta") = 0.9,
      py::arg("rho") = 1e-4, py::arg("ell") = 3, py::arg("max_iter") = 100,
      py::arg("linear_measurements") = false);
}
