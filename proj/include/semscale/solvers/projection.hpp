#pragma once

#include <deque>
#include <span>
#include <vector>

#include "semscale/sim/cluster.hpp"
#include "semscale/solvers/krylov.hpp"

namespace semscale::solvers {

/// Initial guesses from previous solutions of H x = f.
///
/// Keeps an H-orthonormal basis x_i of the last `capacity` solutions, with H x_i. The
/// projection x_bar = sum (x_i . f) x_i is the H-norm best approximation to
/// H^{-1} f in their span; only the remainder f - H x_bar is handed to the
/// iterative solver. Capacity 0 disables the scheme.
class ProjectionSpace {
public:
  explicit ProjectionSpace(int capacity = 5);

  /// Returns x_bar and overwrites f with f - H x_bar.
  std::vector<double> project_out(std::span<double> f, sim::Exec& exec);
  /// Adds the full solution x = x_bar + dx. Costs one application of H.
  /// Directions that are (numerically) already in the span are dropped. Once
  /// more than `capacity` solutions have been seen the oldest is evicted and
  /// the basis is re-orthonormalized from the stored solutions and images.
  void update(std::span<const double> x, const LinearMap& h, sim::Exec& exec);
  void clear();

  [[nodiscard]] int capacity() const { return capacity_; }
  [[nodiscard]] int size() const { return static_cast<int>(basis_.size()); }
  [[nodiscard]] const std::deque<std::vector<double>>& basis() const { return basis_; }
  [[nodiscard]] const std::deque<std::vector<double>>& images() const { return images_; }

private:
  void append(const std::vector<double>& x, const std::vector<double>& hx, sim::Exec& exec);

  int capacity_;
  std::deque<std::vector<double>> solutions_;
  std::deque<std::vector<double>> solution_images_;
  std::deque<std::vector<double>> basis_;
  std::deque<std::vector<double>> images_;
};

} // namespace semscale::solvers
