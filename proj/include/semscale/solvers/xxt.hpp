#pragma once

#include <array>
#include <span>
#include <vector>

#include "semscale/sim/cluster.hpp"
#include "semscale/solvers/sparse.hpp"

namespace semscale::solvers {

/// Nested-dissection ordering: recursive median splits (longest coordinate axis
/// when coordinates are given, index order otherwise); the vertices of the
/// right half that touch the left half form the separator, numbered last.
/// Returns new-to-old.
std::vector<int> nested_dissection(const CsrMatrix& a, std::span<const std::array<double, 3>> coords = {});

/// Direct solver storing A^{-1} = X X^T with X = L^{-T} in nested-dissection order.
///
/// A matrix with zero row sums is treated as a pure-Neumann operator: the last
/// vertex in the ordering is grounded and solutions are returned with zero mean,
/// which is the pseudo-inverse action on zero-mean right-hand sides.
class XxtSolver {
public:
  /// Throws FactorizationError when the (grounded) matrix is not positive definite.
  explicit XxtSolver(const CsrMatrix& a, std::span<const std::array<double, 3>> coords = {});

  void solve(std::span<const double> b, std::span<double> x) const;

  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] bool singular() const { return singular_; }
  [[nodiscard]] const std::vector<int>& permutation() const { return perm_; }
  [[nodiscard]] std::size_t nnz() const;
  /// Row (ordered index) lists of each column of X.
  [[nodiscard]] const std::vector<std::vector<int>>& column_rows() const { return rows_; }
  /// Elimination-tree parent of each ordered index (-1 at roots).
  [[nodiscard]] const std::vector<int>& etree() const { return parent_; }
  [[nodiscard]] std::uint64_t solve_flops() const { return 4 * static_cast<std::uint64_t>(nnz()); }

  /// Cost of one distributed solve: every rank keeps the rows of X for the
  /// vertices it owns; at hypercube stage s a rank exchanges one word per
  /// column whose support touches both its 2^s-block and its partner's.
  [[nodiscard]] sim::CommPlan comm_plan(std::span<const int> vertex_owner, int num_ranks) const;

private:
  int n_ = 0;
  int m_ = 0;  // factored size (n - 1 when grounded)
  bool singular_ = false;
  std::vector<int> perm_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> rows_;
  std::vector<std::vector<double>> vals_;
};

} // namespace semscale::solvers
