#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "semscale/sem/helmholtz.hpp"

namespace semscale::mesh {

/// Structured box of Ex x Ey x Ez affine hexahedra.
///
/// Elements are numbered e = i + Ex (j + Ey k). Corner c of an element has
/// lattice offsets (c & 1, (c >> 1) & 1, (c >> 2) & 1). In periodic directions
/// the vertex lattice wraps, so opposite-face vertices share an index.
struct HexMesh {
  std::array<int, 3> extents{1, 1, 1};
  std::array<double, 3> box{1.0, 1.0, 1.0};
  std::array<bool, 3> periodic{false, false, false};
  std::vector<std::array<int, 8>> elements;
  std::vector<std::array<double, 3>> vertices;

  [[nodiscard]] int num_elements() const { return static_cast<int>(elements.size()); }
  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices.size()); }
  [[nodiscard]] int element_index(int i, int j, int k) const { return i + extents[0] * (j + extents[1] * k); }
  [[nodiscard]] std::array<int, 3> element_lattice(int e) const {
    return {e % extents[0], (e / extents[0]) % extents[1], e / (extents[0] * extents[1])};
  }
  /// Number of distinct vertex lattice positions along `dim`.
  [[nodiscard]] int vertex_extent(int dim) const {
    return periodic[static_cast<std::size_t>(dim)] ? extents[static_cast<std::size_t>(dim)]
                                                   : extents[static_cast<std::size_t>(dim)] + 1;
  }
  [[nodiscard]] int vertex_index(int i, int j, int k) const;
  [[nodiscard]] double element_size(int dim) const {
    return box[static_cast<std::size_t>(dim)] / extents[static_cast<std::size_t>(dim)];
  }
  /// All elements share this geometry (uniform box).
  [[nodiscard]] sem::ElementGeometry geometry() const {
    return {element_size(0), element_size(1), element_size(2)};
  }
  /// Lower corner of element e.
  [[nodiscard]] std::array<double, 3> element_origin(int e) const;
};

/// Throws InvalidArgument for zero extents or non-positive box dimensions.
HexMesh build_box_mesh(int ex, int ey, int ez, std::array<double, 3> box = {1.0, 1.0, 1.0},
                       std::array<bool, 3> periodic = {false, false, false});

/// Line-oriented text dump: header "mesh Ex Ey Ez Lx Ly Lz px py pz", vertex and element tables.
void write_mesh(std::ostream& os, const HexMesh& mesh);

} // namespace semscale::mesh
