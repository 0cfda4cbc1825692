#pragma once

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "opreg/prs.hpp"

namespace opreg::detail {

// Edge-decomposed splitting shared by operator and convex regression.
//
// Every node i carries a block of `block` unknowns with target column
// targets.col(i). Each edge e = (i, j) keeps copies of both blocks; the local
// step projects the blended point
//     w_e = (rho (y_i; y_j) + (ell - 1) z_e) / (ell - 1 + rho)
// onto the edge constraint, then copies are averaged into v and the duals move
// by (v - t). `local(e, w, t)` performs the projection for edge e.
template <class LocalSolve>
void consensus_prs(const Matrix& targets, const EdgeSet& edges, double rho, const StopRule& stop,
                   const PrsOptions& options, LocalSolve&& local, PrsState& state,
                   Matrix& consensus, PrsDiagnostics& diag) {
  const Index block = targets.rows();
  const Index ell = targets.cols();
  const Index num_edges = static_cast<Index>(edges.size());
  const double degree = static_cast<double>(ell - 1);
  const double data_weight = rho / (degree + rho);
  const double dual_weight = degree / (degree + rho);

  if (!state.compatible(block, num_edges)) {
    state.duals = Matrix::Zero(2 * block, num_edges);
    state.iterations = 0;
  }
  state.rho = rho;

  Matrix& z = state.duals;
  Matrix copies(2 * block, num_edges);
  consensus.setZero(block, ell);

  auto local_range = [&](Index begin, Index end, Vector& w) {
    for (Index e = begin; e < end; ++e) {
      const auto [i, j] = edges.pairs[static_cast<std::size_t>(e)];
      w.head(block) = data_weight * targets.col(i) + dual_weight * z.col(e).head(block);
      w.tail(block) = data_weight * targets.col(j) + dual_weight * z.col(e).tail(block);
      local(e, w, copies.col(e));
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(num_edges)));
  std::vector<Vector> scratch(workers, Vector(2 * block));

  diag = PrsDiagnostics{};
  for (int h = 0; h < stop.max_iterations; ++h) {
    if (workers == 1) {
      local_range(0, num_edges, scratch[0]);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      const Index chunk = (num_edges + workers - 1) / workers;
      for (unsigned t = 0; t < workers; ++t) {
        const Index begin = std::min<Index>(num_edges, t * chunk);
        const Index end = std::min<Index>(num_edges, begin + chunk);
        pool.emplace_back([&, begin, end, t] { local_range(begin, end, scratch[t]); });
      }
    }

    consensus.setZero();
    for (Index e = 0; e < num_edges; ++e) {
      const auto [i, j] = edges.pairs[static_cast<std::size_t>(e)];
      consensus.col(i) += 2.0 * copies.col(e).head(block) - z.col(e).head(block);
      consensus.col(j) += 2.0 * copies.col(e).tail(block) - z.col(e).tail(block);
    }
    consensus /= degree;

    double residual = 0.0;
    for (Index e = 0; e < num_edges; ++e) {
      const auto [i, j] = edges.pairs[static_cast<std::size_t>(e)];
      auto zi = z.col(e).head(block);
      auto zj = z.col(e).tail(block);
      for (Index k = 0; k < block; ++k) {
        const double di = consensus(k, i) - copies(k, e);
        const double dj = consensus(k, j) - copies(block + k, e);
        zi[k] += di;
        zj[k] += dj;
        residual = std::max(residual, std::max(std::abs(di), std::abs(dj)));
      }
    }

    ++state.iterations;
    diag.iterations = h + 1;
    diag.residual = residual;
    if (!std::isfinite(residual)) break;
    if (residual <= stop.tolerance) {
      diag.converged = true;
      break;
    }
  }
}

}  // namespace opreg::detail
