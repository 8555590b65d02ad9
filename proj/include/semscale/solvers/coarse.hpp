#pragma once

#include <array>
#include <span>
#include <vector>

#include "semscale/mesh/hex_mesh.hpp"
#include "semscale/mesh/numbering.hpp"
#include "semscale/mesh/partition.hpp"
#include "semscale/solvers/sparse.hpp"

namespace semscale::solvers {

/// Trilinear finite-element Laplacian on the mesh vertices (natural boundaries,
/// periodic wrap through shared vertex indices).
CsrMatrix coarse_assemble(const mesh::HexMesh& mesh);

/// Rank of the lowest-index element touching each vertex.
std::vector<int> vertex_owners(const mesh::HexMesh& mesh, const mesh::Partition& partition);

/// Trilinear interpolation from vertex values to global GLL points (R0^T), and its transpose.
class CoarseTransfer {
public:
  CoarseTransfer(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering);

  /// fine += R0^T coarse
  void prolong(std::span<const double> coarse, std::span<double> fine) const;
  /// coarse = R0 fine
  void restrict_to(std::span<const double> fine, std::span<double> coarse) const;
  [[nodiscard]] int num_vertices() const { return num_vertices_; }

private:
  struct Weight1d {
    std::array<int, 2> vertex;
    std::array<double, 2> weight;
  };
  std::array<std::vector<Weight1d>, 3> axis_;
  std::array<int, 3> lattice_{};
  std::array<int, 3> vertex_extent_{};
  int num_vertices_ = 0;
};

} // namespace semscale::solvers
