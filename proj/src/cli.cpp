#include "opreg/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "CLI11.hpp"
#include "opreg/bench.hpp"
#include "opreg/io.hpp"

namespace opreg::cli {

namespace {

namespace fs = std::filesystem;

/// Bad input files, unknown config keys and the like (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Feeds key=value lines into the options of `command` that were not given
/// on the command line.
void apply_config(CLI::App& command, const std::string& path) {
  if (path.empty()) return;
  std::ifstream file(path);
  if (!file) throw UsageError("cannot read config file " + path);
  CLI::ConfigINI parser;
  std::vector<CLI::ConfigItem> items;
  try {
    items = parser.from_config(file);
  } catch (const CLI::ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name.empty() || item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty()) throw UsageError(path + ": sections are not supported");
    if (item.name == "config") throw UsageError(path + ": nested config files are not supported");
    CLI::Option* option = command.get_option_no_throw("--" + item.name);
    if (option == nullptr) throw UsageError(path + ": unknown key '" + item.name + "'");
    if (option->count() > 0) continue;
    try {
      for (const auto& value : item.inputs) option->add_result(value);
      option->run_callback();
    } catch (const CLI::ParseError& e) {
      throw UsageError(path + ": key '" + item.name + "': " + e.what());
    }
  }
}

void require_out(const std::string& out) {
  if (out.empty()) throw UsageError("--out is required");
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path.string());
  return f;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string dataset;
  std::string out;
  std::string diagnostics;
  std::string config;
  double zeta = 0.9;
  double rho = 1.0;
  int max_iter = 100;
  double tol = 1e-8;
  double mu = 0.0;
  double L = 1.0;
};

void add_fit(CLI::App& app, FitArgs& a) {
  app.add_option("dataset,--dataset", a.dataset,
                 "CSV file i,x_1..x_n,y_1..y_n (or i,x_1..x_n,f,z_1..z_n)");
  app.add_option("--out", a.out, "fitted values, CSV");
  app.add_option("--diagnostics", a.diagnostics, "JSON sidecar (default: --out with .json)");
  app.add_option("--zeta", a.zeta, "contraction factor");
  app.add_option("--rho", a.rho, "splitting penalty");
  app.add_option("--max-iter", a.max_iter, "iteration budget");
  app.add_option("--tol", a.tol, "stop when the dual update is below this");
  app.add_option("--mu", a.mu, "function samples: strong convexity");
  app.add_option("--L", a.L, "function samples: smoothness");
  app.add_option("--config", a.config, "key=value file");
}

int run_fit(const FitArgs& a, std::ostream& out) {
  if (a.dataset.empty()) throw UsageError("fit: dataset path is required");
  require_out(a.out);
  std::ifstream in(a.dataset);
  if (!in) throw UsageError("cannot read " + a.dataset);
  std::string header;
  std::getline(in, header);
  in.seekg(0);
  const StopRule stop{a.max_iter, a.tol};

  PrsDiagnostics diagnostics;
  auto csv = open_output(a.out);
  if (io::is_function_header(header)) {
    io::FunctionSamples samples;
    try {
      samples = io::read_function_samples(in);
    } catch (const InvalidArgument& e) {
      throw UsageError(a.dataset + ": " + e.what());
    }
    const auto result = cvxreg_fit(samples.data, {a.mu, a.L}, a.rho, stop);
    io::write_function_fit(csv, samples.ids, result.fit);
    diagnostics = result.diagnostics;
  } else {
    io::OperatorSamples samples;
    try {
      samples = io::read_operator_samples(in);
    } catch (const InvalidArgument& e) {
      throw UsageError(a.dataset + ": " + e.what());
    }
    const auto result = opreg_fit(samples.data, a.zeta, a.rho, stop);
    io::write_operator_fit(csv, samples.ids, result.fit.values);
    diagnostics = result.diagnostics;
  }
  if (!csv) throw UsageError("failed writing " + a.out);

  const fs::path sidecar =
      a.diagnostics.empty() ? fs::path(a.out).replace_extension(".json") : fs::path(a.diagnostics);
  auto json = open_output(sidecar);
  io::write_diagnostics(json, diagnostics);
  out << "iterations " << diagnostics.iterations << ", residual " << diagnostics.residual
      << ", max violation " << diagnostics.max_violation << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CommonBench {
  std::string out;
  std::string config;
  double zeta = 0.9;
  double rho = 1.0;
  Index ell = 3;
  std::size_t horizon = 0;
  std::uint64_t seed = 1;
  int max_iter = 100;
  bool cold_start = false;
  bool no_wall_time = false;
};

void add_common(CLI::App& app, CommonBench& c) {
  app.add_option("--out", c.out, "output directory");
  app.add_option("--config", c.config, "key=value file");
  app.add_option("--zeta", c.zeta, "contraction factor of the regularized operator");
  app.add_option("--rho", c.rho, "splitting penalty");
  app.add_option("--ell", c.ell, "anchor points per step");
  app.add_option("--horizon", c.horizon, "number of time steps");
  app.add_option("--seed", c.seed, "problem and sampling seed");
  app.add_option("--max-iter", c.max_iter, "splitting iterations per regression");
  app.add_flag("--cold-start", c.cold_start, "do not carry duals between time steps");
  app.add_flag("--no-wall-time", c.no_wall_time, "write 0 for wall times (byte-stable output)");
}

BoostConfig boost_from(const CommonBench& c) {
  BoostConfig b;
  b.ell = c.ell;
  b.zeta = c.zeta;
  b.rho = c.rho;
  b.rng_seed = c.seed;
  b.stop.max_iterations = c.max_iter;
  return b;
}

int finish_bench(const CommonBench& c, const std::vector<bench::RunTrace>& traces,
                 std::ostream& out) {
  try {
    bench::write_run(c.out, traces);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  bool failed = false;
  for (const auto& t : traces) {
    out << std::left << std::setw(20) << t.solver << " as. err. " << std::setw(12)
        << bench::asymptotic_error(t.errors()) << " t/step " << std::setw(12)
        << t.mean_step_time_s() << " failed steps " << t.failures() << '\n';
    failed = failed || t.failures() > 0;
  }
  return failed ? kExitSolverFailure : kExitOk;
}

struct LassoArgs {
  CommonBench common;
  bench::LassoStreamSpec spec;
  bool interp = false;
  int tau = 2;
  bool cvxreg = false;
};

void add_lasso(CLI::App& app, LassoArgs& a) {
  a.common.rho = 1e-6;
  a.common.horizon = a.spec.horizon;
  add_common(app, a.common);
  app.add_option("--n", a.spec.n, "dimension (even)");
  app.add_option("--L", a.spec.L, "largest Hessian eigenvalue");
  app.add_option("--mu", a.spec.mu, "smallest nonzero Hessian eigenvalue");
  app.add_option("--w", a.spec.w, "l1 weight");
  app.add_option("--noise-variance", a.spec.noise_variance, "observation noise variance");
  app.add_flag("--interp", a.interp, "also run the interpolated variant");
  app.add_option("--tau", a.tau, "interpolated variant: refresh period");
  app.add_flag("--cvxreg", a.cvxreg, "also run the convex-regression variant");
}

int run_lasso(LassoArgs a, std::ostream& out) {
  require_out(a.common.out);
  a.spec.horizon = a.common.horizon;
  a.spec.seed = a.common.seed;
  const bench::LassoStream stream(a.spec);
  const double alpha = stream.default_step();
  BoostConfig boost = boost_from(a.common);
  boost.tau = a.tau;
  auto solvers = bench::lasso_solvers(alpha, 1.0 / a.spec.L, boost);
  if (a.interp) {
    bench::SolverSpec s;
    s.kind = bench::SolverKind::kOpRegBoostInterpolated;
    s.alpha = alpha;
    s.boost = boost;
    solvers.push_back(s);
  }
  if (a.cvxreg) {
    bench::SolverSpec s;
    s.kind = bench::SolverKind::kCvxRegBoost;
    s.alpha = alpha;
    s.boost = boost;
    // f_k is only convex (rank n/2); the nominal spectrum of A'A on its range
    s.bounds = {a.spec.mu, a.spec.L};
    solvers.push_back(s);
  }
  for (auto& s : solvers) s.warm_start = !a.common.cold_start;
  const auto traces = bench::run_experiment(stream, solvers, bench::BudgetRule{a.common.ell},
                                            {!a.common.no_wall_time});
  return finish_bench(a.common, traces, out);
}

struct PhaseArgs {
  CommonBench common;
  bench::PhaseStreamSpec spec;
};

void add_phase(CLI::App& app, PhaseArgs& a) {
  a.common.rho = 1e-4;
  a.common.horizon = a.spec.horizon;
  add_common(app, a.common);
  app.add_option("--pieces", a.spec.pieces, "constant segments of the signal");
  app.add_option("--n", a.spec.n, "signal dimension");
  app.add_option("--m", a.spec.m, "number of measurements");
  app.add_option("--alpha", a.spec.alpha, "prox-linear step size");
  app.add_option("--noise-scale", a.spec.noise_scale, "Laplace noise scale");
  app.add_flag("--linear-measurements", a.spec.linear_measurements,
               "b = <a_i, y> + noise instead of the squared model");
}

int run_phase(PhaseArgs a, std::ostream& out) {
  require_out(a.common.out);
  a.spec.horizon = a.common.horizon;
  a.spec.seed = a.common.seed;
  const bench::PhaseStream stream(a.spec);
  auto solvers = bench::phase_solvers(a.spec.alpha, boost_from(a.common));
  for (auto& s : solvers) s.warm_start = !a.common.cold_start;
  bench::BudgetRule budget;
  budget.ell = a.common.ell;
  const auto traces = bench::run_experiment(stream, solvers, budget, {!a.common.no_wall_time});
  return finish_bench(a.common, traces, out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operator-regression boosting for online optimization"};
  app.name("opreg");
  app.require_subcommand(1);

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "regularize sampled operator/gradient data");
  add_fit(*fit_cmd, fit);

  CLI::App* bench_cmd = app.add_subcommand("bench", "online benchmarks");
  bench_cmd->require_subcommand(1);
  LassoArgs lasso;
  CLI::App* lasso_cmd = bench_cmd->add_subcommand("lasso", "ill-conditioned online lasso");
  add_lasso(*lasso_cmd, lasso);
  PhaseArgs phase;
  CLI::App* phase_cmd = bench_cmd->add_subcommand("phase", "online robust phase retrieval");
  add_phase(*phase_cmd, phase);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitIoOrConfig;
  }

  try {
    if (fit_cmd->parsed()) {
      apply_config(*fit_cmd, fit.config);
      return run_fit(fit, out);
    }
    if (lasso_cmd->parsed()) {
      apply_config(*lasso_cmd, lasso.common.config);
      return run_lasso(lasso, out);
    }
    apply_config(*phase_cmd, phase.common.config);
    return run_phase(phase, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIoOrConfig;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitIoOrConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIoOrConfig;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolverFailure;
  }
}

}  // namespace opreg::cli
