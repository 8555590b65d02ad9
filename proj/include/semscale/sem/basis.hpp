#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace semscale::sem {

/// One-dimensional Gauss-Lobatto-Legendre reference data on [-1, 1].
///
/// Every API in this project takes `n_per_dir`, the number of GLL points per
/// direction. A run quoted as "order 8" here means 8
/// points per direction (degree 7), so an element holds n_per_dir^3 points.
struct ReferenceBasis {
  int n_per_dir = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  /// Row-major n x n; D[i*n + j] = l_j'(x_i).
  std::vector<double> diff_matrix;
  /// Transpose of diff_matrix, kept for the weak-form contractions.
  std::vector<double> diff_matrix_t;

  [[nodiscard]] double d(int i, int j) const { return diff_matrix[static_cast<std::size_t>(i * n_per_dir + j)]; }
  [[nodiscard]] std::size_t points_per_element() const {
    const auto n = static_cast<std::size_t>(n_per_dir);
    return n * n * n;
  }
};

/// GLL nodes (ascending, endpoints exactly -1 and 1) and quadrature weights.
/// Throws InvalidArgument for n_per_dir < 2.
std::pair<std::vector<double>, std::vector<double>> gll_nodes_weights(int n_per_dir);

/// Lagrange derivative matrix on the given nodes, D[i][j] = l_j'(x_i), row-major.
std::vector<double> diff_matrix(std::span<const double> nodes);

ReferenceBasis make_reference_basis(int n_per_dir);

/// Legendre polynomial P_k(x) by the three-term recurrence.
double legendre(int k, double x);

/// Row-major (targets.size() x nodes.size()) matrix evaluating the Lagrange
/// interpolant through `nodes` at each target abscissa.
std::vector<double> interpolation_matrix(std::span<const double> nodes, std::span<const double> targets);

} // namespace semscale::sem
