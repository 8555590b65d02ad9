#pragma once

#include <span>
#include <vector>

namespace semscale::solvers {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed sparse rows with sorted, duplicate-free column indices.
struct CsrMatrix {
  int n = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  /// Duplicates are summed. Throws InvalidArgument for out-of-range indices.
  static CsrMatrix from_triplets(int n, std::span<const Triplet> entries);

  void apply(std::span<const double> x, std::span<double> y) const;
  [[nodiscard]] std::vector<double> diagonal() const;
  [[nodiscard]] double at(int i, int j) const;
  [[nodiscard]] std::size_t nnz() const { return col.size(); }
  /// Row-major dense copy.
  [[nodiscard]] std::vector<double> dense() const;
  [[nodiscard]] bool symmetric(double tol) const;
};

} // namespace semscale::solvers
