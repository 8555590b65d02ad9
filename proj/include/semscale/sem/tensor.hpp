#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace semscale::sem {

/// Extents of a 3-D tensor stored with the first index fastest: p = a + nx*(b + ny*c).
struct Shape3 {
  std::size_t nx = 0, ny = 0, nz = 0;
  [[nodiscard]] std::size_t size() const { return nx * ny * nz; }
  [[nodiscard]] std::size_t extent(int dim) const { return dim == 0 ? nx : (dim == 1 ? ny : nz); }
};

/// out = (M applied along `dim`) in, with M row-major of size rows x extent(dim).
/// `out` has shape `in_shape` with extent(dim) replaced by `rows`.
/// With `accumulate`, results are added to the existing contents of `out`.
/// Costs 2 * rows * in_shape.size() flops.
void contract(std::span<const double> mat, std::size_t rows, int dim, Shape3 in_shape, std::span<const double> in,
              std::span<double> out, bool accumulate = false);

/// Convenience: apply the same square n x n matrix along one dimension of an n^3 field.
inline void contract_cube(std::span<const double> mat, std::size_t n, int dim, std::span<const double> in,
                          std::span<double> out, bool accumulate = false) {
  contract(mat, n, dim, Shape3{n, n, n}, in, out, accumulate);
}

} // namespace semscale::sem
