#include "semscale/mesh/hex_mesh.hpp"

#include <ostream>

#include "semscale/error.hpp"

namespace semscale::mesh {

int HexMesh::vertex_index(int i, int j, int k) const {
  const int vx = vertex_extent(0), vy = vertex_extent(1), vz = vertex_extent(2);
  if (periodic[0]) i %= vx;
  if (periodic[1]) j %= vy;
  if (periodic[2]) k %= vz;
  return i + vx * (j + vy * k);
}

std::array<double, 3> HexMesh::element_origin(int e) const {
  const auto ijk = element_lattice(e);
  return {ijk[0] * element_size(0), ijk[1] * element_size(1), ijk[2] * element_size(2)};
}

HexMesh build_box_mesh(int ex, int ey, int ez, std::array<double, 3> box, std::array<bool, 3> periodic) {
  if (ex < 1 || ey < 1 || ez < 1) throw InvalidArgument("build_box_mesh: element extents must be >= 1");
  if (!(box[0] > 0.0 && box[1] > 0.0 && box[2] > 0.0))
    throw InvalidArgument("build_box_mesh: box dimensions must be positive");

  HexMesh m;
  m.extents = {ex, ey, ez};
  m.box = box;
  m.periodic = periodic;

  const int vx = m.vertex_extent(0), vy = m.vertex_extent(1), vz = m.vertex_extent(2);
  m.vertices.resize(static_cast<std::size_t>(vx) * vy * vz);
  for (int k = 0; k < vz; ++k)
    for (int j = 0; j < vy; ++j)
      for (int i = 0; i < vx; ++i)
        m.vertices[static_cast<std::size_t>(m.vertex_index(i, j, k))] = {i * m.element_size(0),
                                                                        j * m.element_size(1),
                                                                        k * m.element_size(2)};

  m.elements.resize(static_cast<std::size_t>(ex) * ey * ez);
  for (int k = 0; k < ez; ++k)
    for (int j = 0; j < ey; ++j)
      for (int i = 0; i < ex; ++i) {
        auto& el = m.elements[static_cast<std::size_t>(m.element_index(i, j, k))];
        for (int c = 0; c < 8; ++c)
          el[static_cast<std::size_t>(c)] = m.vertex_index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
      }
  return m;
}

void write_mesh(std::ostream& os, const HexMesh& mesh) {
  os << "mesh " << mesh.extents[0] << ' ' << mesh.extents[1] << ' ' << mesh.extents[2] << ' ' << mesh.box[0] << ' '
     << mesh.box[1] << ' ' << mesh.box[2] << ' ' << mesh.periodic[0] << ' ' << mesh.periodic[1] << ' '
     << mesh.periodic[2] << '\n';
  os << "vertices " << mesh.num_vertices() << '\n';
  for (const auto& v : mesh.vertices) os << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  os << "elements " << mesh.num_elements() << '\n';
  for (const auto& el : mesh.elements) {
    for (std::size_t c = 0; c < 8; ++c) os << el[c] << (c == 7 ? '\n' : ' ');
  }
}

} // namespace semscale::mesh
