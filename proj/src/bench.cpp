#include "opreg/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace opreg::bench {

std::string solver_label(SolverKind kind) {
  switch (kind) {
    case SolverKind::kForwardBackward: return "forward_backward";
    case SolverKind::kFista: return "fista";
    case SolverKind::kFistaBacktracking: return "fista_backtracking";
    case SolverKind::kAnderson: return "anderson";
    case SolverKind::kOpRegBoost: return "opreg_boost";
    case SolverKind::kOpRegBoostInterpolated: return "opreg_boost_interp";
    case SolverKind::kCvxRegBoost: return "cvxreg_boost";
    case SolverKind::kProxLinear: return "prox_linear";
  }
  return "unknown";
}

int BudgetRule::steps_for(SolverKind kind) const {
  switch (kind) {
    case SolverKind::kForwardBackward:
    case SolverKind::kFista: return static_cast<int>(ell) + 1;
    case SolverKind::kFistaBacktracking: return backtracking_steps;
    case SolverKind::kAnderson: return anderson_steps;
    case SolverKind::kProxLinear: return prox_linear_steps;
    case SolverKind::kOpRegBoost:
    case SolverKind::kOpRegBoostInterpolated:
    case SolverKind::kCvxRegBoost: return boost_steps;
  }
  return 1;
}

std::size_t RunTrace::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const TraceRow& r) { return !r.error.empty(); }));
}

std::vector<double> RunTrace::errors() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.tracking_error);
  return out;
}

double RunTrace::mean_step_time_s() const {
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  long double total = 0.0L;
  for (const auto& r : rows) total += static_cast<long double>(r.step_wall_ns);
  return static_cast<double>(total / 1e9L / static_cast<long double>(rows.size()) /
                             static_cast<long double>(std::max(1, steps_per_time)));
}

double asymptotic_error(const std::vector<double>& tracking_errors) {
  const std::size_t K = tracking_errors.size();
  if (K == 0) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t count = (K + 3) / 4;
  std::vector<double> tail(tracking_errors.end() - static_cast<std::ptrdiff_t>(count),
                           tracking_errors.end());
  std::sort(tail.begin(), tail.end());
  // Neumaier summation
  double sum = 0.0, carry = 0.0;
  for (double v : tail) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return (sum + carry) / static_cast<double>(count);
}

// ---------------------------------------------------------------------------

namespace {

/// Copy of `problem` whose gradient increments `counter`.
CompositeProblem counted(CompositeProblem problem, const std::shared_ptr<CallCounter>& counter) {
  auto gradient = std::move(problem.smooth.gradient);
  problem.smooth.gradient = [gradient, counter](const Vector& x) {
    counter->increment();
    return gradient(x);
  };
  return problem;
}

struct SolverState {
  Vector x;
  FistaState fista;
  AndersonState anderson;
  PrsState warm;
  InterpolationCache cache;
};

class Runner {
 public:
  Runner(const ProblemStream& stream, SolverSpec spec, int steps)
      : stream_(stream), spec_(std::move(spec)), steps_(steps) {
    spec_.boost.alpha = spec_.alpha;
    state_.x = stream.initial_point();
    state_.fista = FistaState::start(state_.x);
    state_.anderson = AndersonState(spec_.anderson_memory);
  }

  /// Advances one time step; returns the number of operator/gradient calls.
  std::uint64_t advance(std::size_t k) {
    SolverState& s = state_;
    PrsState* warm = spec_.warm_start ? &s.warm : nullptr;
    switch (spec_.kind) {
      case SolverKind::kForwardBackward:
      case SolverKind::kFista:
      case SolverKind::kFistaBacktracking:
      case SolverKind::kAnderson: {
        auto counter = std::make_shared<CallCounter>();
        const CompositeProblem problem = counted(stream_.problem_at(k), counter);
        if (spec_.kind == SolverKind::kForwardBackward) {
          for (int i = 0; i < steps_; ++i) s.x = fb_step(problem, spec_.alpha, s.x);
        } else if (spec_.kind == SolverKind::kFista) {
          for (int i = 0; i < steps_; ++i) fista_step(s.fista, problem, spec_.alpha);
          s.x = s.fista.x;
        } else if (spec_.kind == SolverKind::kFistaBacktracking) {
          for (int i = 0; i < steps_; ++i) {
            fista_backtracking_step(s.fista, problem, spec_.backtracking);
          }
          s.x = s.fista.x;
        } else {
          const OperatorHandle G(
              [&problem, alpha = spec_.alpha](const Vector& v) { return fb_step(problem, alpha, v); });
          s.anderson.invalidate_cache();
          for (int i = 0; i < steps_; ++i) s.x = anderson_step(s.anderson, G, s.x);
        }
        return counter->value();
      }
      case SolverKind::kOpRegBoost: {
        std::uint64_t calls = 0;
        for (int i = 0; i < steps_; ++i) {
          auto step = opreg_boost_step(stream_, k, s.x, spec_.boost, warm);
          s.x = std::move(step.x);
          calls += step.stats.operator_calls;
        }
        return calls;
      }
      case SolverKind::kOpRegBoostInterpolated: {
        std::uint64_t calls = 0;
        for (int i = 0; i < steps_; ++i) {
          auto step = opreg_boost_interpolated_step(stream_, k, s.x, spec_.boost, s.cache, warm);
          s.x = std::move(step.x);
          calls += step.stats.operator_calls;
        }
        return calls;
      }
      case SolverKind::kCvxRegBoost: {
        std::uint64_t calls = 0;
        for (int i = 0; i < steps_; ++i) {
          auto step = cvxreg_boost_step(stream_, k, s.x, spec_.boost, spec_.bounds, warm);
          s.x = std::move(step.x);
          calls += step.stats.gradient_calls;
        }
        return calls;
      }
      case SolverKind::kProxLinear: {
        const OperatorHandle T = stream_.algorithmic_operator(k, spec_.alpha);
        const NonsmoothPart g = stream_.problem_at(k).nonsmooth;
        for (int i = 0; i < steps_; ++i) {
          s.x = g.prox(T(s.x), spec_.alpha);
          require_finite(s.x, s.x, "prox-linear iterate");
        }
        return T.calls();
      }
    }
    return 0;
  }

  TraceRow step(std::size_t k, bool record_wall_time) {
    TraceRow row;
    row.k = k;
    const SolverState saved = state_;
    const auto start = std::chrono::steady_clock::now();
    try {
      row.calls = advance(k);
    } catch (const std::exception& e) {
      state_ = saved;
      row.error = e.what();
    }
    const auto stop = std::chrono::steady_clock::now();
    if (record_wall_time) {
      row.step_wall_ns =
          std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
    }
    row.tracking_error = stream_.tracking_error(state_.x, k);
    return row;
  }

 private:
  const ProblemStream& stream_;
  SolverSpec spec_;
  int steps_;
  SolverState state_;
};

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<RunTrace> run_experiment(const ProblemStream& stream,
                                     const std::vector<SolverSpec>& solvers,
                                     const BudgetRule& budget, const RunOptions& options) {
  std::vector<RunTrace> traces;
  traces.reserve(solvers.size());
  for (const auto& spec : solvers) {
    const int steps = budget.steps_for(spec.kind);
    if (steps < 1) throw InvalidArgument("budget: steps per time must be >= 1");
    RunTrace trace;
    trace.solver = spec.name();
    trace.steps_per_time = steps;
    Runner runner(stream, spec, steps);
    trace.rows.reserve(stream.horizon());
    for (std::size_t k = 1; k <= stream.horizon(); ++k) {
      trace.rows.push_back(runner.step(k, options.record_wall_time));
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

// ---------------------------------------------------------------------------

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "k,tracking_error,calls,step_wall_ns\n";
  for (const auto& r : trace.rows) {
    out << r.k << ',' << shortest(r.tracking_error) << ',' << r.calls << ',' << r.step_wall_ns
        << '\n';
  }
}

RunTrace read_trace_csv(std::istream& in, const std::string& solver) {
  RunTrace trace;
  trace.solver = solver;
  std::string line;
  if (!std::getline(in, line) || line != "k,tracking_error,calls,step_wall_ns") {
    throw InvalidArgument("trace CSV: unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRow row;
    const char* p = line.data();
    const char* end = p + line.size();
    auto field = [&](auto& value) {
      const auto res = std::from_chars(p, end, value);
      if (res.ec != std::errc()) throw InvalidArgument("trace CSV: bad field in '" + line + "'");
      p = res.ptr;
      if (p != end) {
        if (*p != ',') throw InvalidArgument("trace CSV: bad separator in '" + line + "'");
        ++p;
      }
    };
    field(row.k);
    field(row.tracking_error);
    field(row.calls);
    field(row.step_wall_ns);
    trace.rows.push_back(row);
  }
  return trace;
}

void write_summary_json(std::ostream& out, const std::vector<RunTrace>& traces) {
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& t : traces) {
    summary[t.solver] = {{"asymptotic_error", asymptotic_error(t.errors())},
                         {"mean_step_time_s", t.mean_step_time_s()},
                         {"failed_steps", t.failures()}};
  }
  out << summary.dump(2) << '\n';
}

void write_run(const std::string& directory, const std::vector<RunTrace>& traces) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(directory) / name);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(directory) / name).string());
    return f;
  };
  bool any_failure = false;
  for (const auto& t : traces) {
    auto f = open(t.solver + ".csv");
    write_trace_csv(f, t);
    any_failure = any_failure || t.failures() > 0;
  }
  auto s = open("summary.json");
  write_summary_json(s, traces);
  if (any_failure) {
    auto e = open("errors.csv");
    e << "solver,k,message\n";
    for (const auto& t : traces) {
      for (const auto& r : t.rows) {
        if (r.error.empty()) continue;
        std::string msg = r.error;
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::replace(msg.begin(), msg.end(), '"', '\'');
        e << t.solver << ',' << r.k << ",\"" << msg << "\"\n";
      }
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<SolverSpec> lasso_solvers(double alpha, double fista_alpha, const BoostConfig& boost) {
  std::vector<SolverSpec> out;
  for (const auto kind : {SolverKind::kForwardBackward, SolverKind::kFista,
                          SolverKind::kFistaBacktracking, SolverKind::kAnderson,
                          SolverKind::kOpRegBoost}) {
    SolverSpec s;
    s.kind = kind;
    s.alpha = kind == SolverKind::kFista ? fista_alpha : alpha;
    s.boost = boost;
    out.push_back(s);
  }
  return out;
}

std::vector<SolverSpec> phase_solvers(double alpha, const BoostConfig& boost) {
  std::vector<SolverSpec> out;
  for (const auto kind : {SolverKind::kProxLinear, SolverKind::kOpRegBoost}) {
    SolverSpec s;
    s.kind = kind;
    s.alpha = alpha;
    s.boost = boost;
    out.push_back(s);
  }
  return out;
}

}  // namespace opreg::bench
