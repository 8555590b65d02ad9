#pragma once

#include <array>
#include <vector>

#include "semscale/mesh/hex_mesh.hpp"

namespace semscale::mesh {

/// Global numbering of GLL points on a structured box mesh.
///
/// Global points form a tensor lattice of G_d = E_d (n - 1) (+1 when not
/// periodic) points per direction, numbered g = gx + Gx (gy + Gy gz). Local
/// points are element-major: l = e n^3 + a + n (b + n c).
struct GllNumbering {
  int n_per_dir = 0;
  std::array<int, 3> lattice{0, 0, 0};
  std::vector<int> local_to_global;
  /// Physical coordinate of each lattice index along each axis.
  std::array<std::vector<double>, 3> coords;

  [[nodiscard]] int num_global() const { return lattice[0] * lattice[1] * lattice[2]; }
  [[nodiscard]] std::size_t num_local() const { return local_to_global.size(); }
  [[nodiscard]] std::size_t points_per_element() const {
    const auto n = static_cast<std::size_t>(n_per_dir);
    return n * n * n;
  }
  [[nodiscard]] std::array<int, 3> global_lattice(int g) const {
    return {g % lattice[0], (g / lattice[0]) % lattice[1], g / (lattice[0] * lattice[1])};
  }
  [[nodiscard]] std::array<double, 3> point(int g) const {
    const auto l = global_lattice(g);
    return {coords[0][static_cast<std::size_t>(l[0])], coords[1][static_cast<std::size_t>(l[1])],
            coords[2][static_cast<std::size_t>(l[2])]};
  }
  /// Number of local copies of each global point.
  [[nodiscard]] std::vector<int> multiplicity() const;
};

/// Throws InvalidArgument for n_per_dir < 2.
GllNumbering build_numbering(const HexMesh& mesh, int n_per_dir);

} // namespace semscale::mesh
