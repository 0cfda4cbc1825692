#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "opreg/core.hpp"

namespace opreg {

/// Inner stopping rule: at most max_iterations sweeps, or stop as soon as
/// ||z^{h+1} - z^h||_inf <= tolerance.
struct StopRule {
  int max_iterations = 100;
  double tolerance = 1e-8;

  void validate() const;
};

struct PrsDiagnostics {
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();  ///< last ||dz||_inf
  double max_violation = 0.0;  ///< largest constraint residual at the returned fit
  double objective = 0.0;      ///< least-squares objective at the returned fit
  bool converged = false;      ///< residual <= tolerance before the budget ran out
};

/// Dual variables of the consensus splitting, kept between solves for warm starts.
/// Column e holds z_e = (z_{e,i}; z_{e,j}) for the e-th pair of EdgeSet::complete.
struct PrsState {
  Matrix duals;
  double rho = 0.0;
  int iterations = 0;  ///< total sweeps applied to these duals

  bool compatible(Index block, Index edges) const {
    return duals.rows() == 2 * block && duals.cols() == edges;
  }
};

/// Ordered pairs (i, j), i < j, of {0, ..., ell-1}, each unordered pair once.
struct EdgeSet {
  std::vector<std::pair<Index, Index>> pairs;

  static EdgeSet complete(Index ell);
  std::size_t size() const { return pairs.size(); }
};

struct PrsOptions {
  /// Worker threads for the edge-local updates. Aggregation always reduces in
  /// ascending edge order, so results do not depend on this value.
  unsigned threads = 1;
};

}  // namespace opreg
