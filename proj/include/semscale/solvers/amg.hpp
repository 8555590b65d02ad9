#pragma once

#include <span>
#include <vector>

#include "semscale/sim/cluster.hpp"
#include "semscale/solvers/sparse.hpp"

namespace semscale::solvers {

struct AmgOptions {
  int aggregate_size = 8;
  int max_coarse = 64;
  int max_levels = 20;
  double jacobi_weight = 2.0 / 3.0;
  /// Smooth the piecewise-constant prolongator with one damped-Jacobi step.
  bool smoothed = false;
};

struct AmgLevel {
  CsrMatrix a;
  std::vector<double> inv_diag;
  /// Aggregate of each fine unknown (prolongator to the next level).
  std::vector<int> aggregate;
  /// Prolongator: one CSR row per fine unknown, column indices address coarse
  /// unknowns. Piecewise constant unless smoothed.
  CsrMatrix p;
  int num_coarse = 0;
};

/// Aggregation multigrid used as a symmetric V-cycle preconditioner.
class AmgHierarchy {
public:
  /// Throws FactorizationError when a diagonal entry is not positive or the
  /// coarsest operator is indefinite.
  explicit AmgHierarchy(const CsrMatrix& a, AmgOptions options = {});

  /// One V-cycle from a zero initial guess: x = V b.
  void vcycle(std::span<const double> b, std::span<double> x) const;

  [[nodiscard]] int num_levels() const { return static_cast<int>(levels_.size()) + 1; }
  [[nodiscard]] std::vector<int> level_sizes() const;
  [[nodiscard]] const std::vector<AmgLevel>& levels() const { return levels_; }
  [[nodiscard]] const CsrMatrix& coarsest() const { return coarse_a_; }
  [[nodiscard]] const AmgOptions& options() const { return options_; }

  /// Cost of one distributed V-cycle. Unknown i of the finest level lives on
  /// vertex_owner[i]; an aggregate lives with its seed unknown. Each level
  /// performs three halo exchanges (two smoothing sweeps and the residual) plus
  /// the restriction and prolongation transfers; the coarsest right-hand side
  /// is combined with one all-reduce.
  [[nodiscard]] sim::CommPlan comm_plan(std::span<const int> vertex_owner, int num_ranks) const;

private:
  void cycle(std::size_t level, std::span<const double> b, std::span<double> x) const;

  AmgOptions options_;
  std::vector<AmgLevel> levels_;
  std::vector<std::vector<int>> seeds_;  // seed fine unknown of each aggregate, per level
  CsrMatrix coarse_a_;
  std::vector<double> coarse_pinv_;  // dense row-major pseudo-inverse
};

} // namespace semscale::solvers
