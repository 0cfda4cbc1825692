#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "opreg/baselines.hpp"
#include "opreg/boost.hpp"
#include "opreg/streams.hpp"

namespace opreg::bench {

enum class SolverKind {
  kForwardBackward,
  kFista,
  kFistaBacktracking,
  kAnderson,
  kOpRegBoost,
  kOpRegBoostInterpolated,
  kCvxRegBoost,
  kProxLinear,
};

/// Stable identifier used for file names and summary keys.
std::string solver_label(SolverKind kind);

struct SolverSpec {
  SolverKind kind = SolverKind::kForwardBackward;
  std::string label;  ///< empty: solver_label(kind)
  /// Step size for every kind except backtracking FISTA; the boost variants
  /// take theirs from `boost.alpha`, which the runner overwrites with this.
  double alpha = 1.0;
  BoostConfig boost;
  CurvatureBounds bounds;    ///< CvxReg-Boost only
  bool warm_start = true;    ///< carry PRS duals between time steps
  int anderson_memory = 5;
  BacktrackingOptions backtracking;

  std::string name() const { return label.empty() ? solver_label(kind) : label; }
};

/// Algorithm steps per time step, identical for every run.
struct BudgetRule {
  Index ell = 3;
  int boost_steps = 1;
  int anderson_steps = 2;
  int backtracking_steps = 2;
  int prox_linear_steps = 4;

  int steps_for(SolverKind kind) const;
};

struct TraceRow {
  std::size_t k = 0;
  double tracking_error = 0.0;
  std::uint64_t calls = 0;       ///< operator or gradient evaluations in this step
  std::int64_t step_wall_ns = 0;
  std::string error;             ///< empty unless the step failed and x was held
};

struct RunTrace {
  std::string solver;
  int steps_per_time = 1;
  std::vector<TraceRow> rows;

  std::size_t failures() const;
  std::vector<double> errors() const;
  /// Mean wall time of one algorithm step (time step / steps_per_time).
  double mean_step_time_s() const;
};

/// Mean of the last ceil(K/4) values (the final quartile); NaN when empty.
/// Summed in sorted order with compensation, so it is reproducible from any
/// permutation of the same values.
double asymptotic_error(const std::vector<double>& tracking_errors);

struct RunOptions {
  bool record_wall_time = true;  ///< false writes 0 so traces compare bytewise
};

/// Runs every solver over the stream's horizon from its initial point. A
/// failing step is logged in its row and the iterate is held.
std::vector<RunTrace> run_experiment(const ProblemStream& stream,
                                     const std::vector<SolverSpec>& solvers,
                                     const BudgetRule& budget, const RunOptions& options = {});

/// Header k,tracking_error,calls,step_wall_ns; shortest round-trip decimals.
void write_trace_csv(std::ostream& out, const RunTrace& trace);
/// Parses what write_trace_csv emits (error texts are not part of the CSV).
RunTrace read_trace_csv(std::istream& in, const std::string& solver);
/// {solver: {asymptotic_error, mean_step_time_s, failed_steps}}.
void write_summary_json(std::ostream& out, const std::vector<RunTrace>& traces);

/// Writes <dir>/<solver>.csv for each trace plus <dir>/summary.json, and
/// <dir>/errors.csv when some step failed.
void write_run(const std::string& directory, const std::vector<RunTrace>& traces);

/// Forward-backward, FISTA (both), Anderson and OpReg-Boost. Fixed-step FISTA
/// takes `fista_alpha` (its momentum needs alpha <= 1/L); the rest use `alpha`.
std::vector<SolverSpec> lasso_solvers(double alpha, double fista_alpha, const BoostConfig& boost);
/// Prox-linear and OpReg-Boost.
std::vector<SolverSpec> phase_solvers(double alpha, const BoostConfig& boost);

}  // namespace opreg::bench
