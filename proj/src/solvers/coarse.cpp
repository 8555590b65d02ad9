#include "semscale/solvers/coarse.hpp"

#include "semscale/error.hpp"
#include "semscale/sem/basis.hpp"

namespace semscale::solvers {

CsrMatrix coarse_assemble(const mesh::HexMesh& mesh) {
  std::array<std::array<std::array<double, 2>, 2>, 3> k{}, m{};
  for (int d = 0; d < 3; ++d) {
    const double h = mesh.element_size(d);
    k[static_cast<std::size_t>(d)] = {{{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}}};
    m[static_cast<std::size_t>(d)] = {{{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}}};
  }
  std::array<std::array<double, 8>, 8> ke{};
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const int ax = a & 1, ay = (a >> 1) & 1, az = (a >> 2) & 1;
      const int bx = b & 1, by = (b >> 1) & 1, bz = (b >> 2) & 1;
      ke[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          k[0][ax][bx] * m[1][ay][by] * m[2][az][bz] + m[0][ax][bx] * k[1][ay][by] * m[2][az][bz] +
          m[0][ax][bx] * m[1][ay][by] * k[2][az][bz];
    }
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(mesh.num_elements()) * 64);
  for (const auto& el : mesh.elements)
    for (std::size_t a = 0; a < 8; ++a)
      for (std::size_t b = 0; b < 8; ++b) t.push_back({el[a], el[b], ke[a][b]});
  return CsrMatrix::from_triplets(mesh.num_vertices(), t);
}

std::vector<int> vertex_owners(const mesh::HexMesh& mesh, const mesh::Partition& partition) {
  if (partition.num_elements() != mesh.num_elements()) throw InvalidArgument("vertex_owners: partition does not match mesh");
  std::vector<int> owner(static_cast<std::size_t>(mesh.num_vertices()), -1);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int v : mesh.elements[static_cast<std::size_t>(e)])
      if (owner[static_cast<std::size_t>(v)] < 0) owner[static_cast<std::size_t>(v)] = partition.rank_of_element[static_cast<std::size_t>(e)];
  return owner;
}

CoarseTransfer::CoarseTransfer(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering) {
  const int n = numbering.n_per_dir;
  const auto [nodes, weights] = sem::gll_nodes_weights(n);
  num_vertices_ = mesh.num_vertices();
  for (int d = 0; d < 3; ++d) {
    const auto du = static_cast<std::size_t>(d);
    lattice_[du] = numbering.lattice[du];
    vertex_extent_[du] = mesh.vertex_extent(d);
    auto& ax = axis_[du];
    ax.resize(static_cast<std::size_t>(lattice_[du]));
    for (int g = 0; g < lattice_[du]; ++g) {
      int ie = g / (n - 1);
      int a = g % (n - 1);
      if (ie == mesh.extents[du]) {  // last point of a non-periodic direction
        ie -= 1;
        a = n - 1;
      }
      const double xi = 0.5 * (1.0 + nodes[static_cast<std::size_t>(a)]);
      ax[static_cast<std::size_t>(g)] = {{ie % vertex_extent_[du], (ie + 1) % vertex_extent_[du]}, {1.0 - xi, xi}};
    }
  }
}

void CoarseTransfer::prolong(std::span<const double> coarse, std::span<double> fine) const {
  for (int gz = 0; gz < lattice_[2]; ++gz)
    for (int gy = 0; gy < lattice_[1]; ++gy)
      for (int gx = 0; gx < lattice_[0]; ++gx) {
        const auto& wx = axis_[0][static_cast<std::size_t>(gx)];
        const auto& wy = axis_[1][static_cast<std::size_t>(gy)];
        const auto& wz = axis_[2][static_cast<std::size_t>(gz)];
        double s = 0.0;
        for (int c = 0; c < 2; ++c)
          for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a) {
              const int v = wx.vertex[static_cast<std::size_t>(a)] +
                            vertex_extent_[0] * (wy.vertex[static_cast<std::size_t>(b)] + vertex_extent_[1] * wz.vertex[static_cast<std::size_t>(c)]);
              s += wx.weight[static_cast<std::size_t>(a)] * wy.weight[static_cast<std::size_t>(b)] * wz.weight[static_cast<std::size_t>(c)] *
                   coarse[static_cast<std::size_t>(v)];
            }
        fine[static_cast<std::size_t>(gx + lattice_[0] * (gy + lattice_[1] * gz))] += s;
      }
}

void CoarseTransfer::restrict_to(std::span<const double> fine, std::span<double> coarse) const {
  std::fill(coarse.begin(), coarse.end(), 0.0);
  for (int gz = 0; gz < lattice_[2]; ++gz)
    for (int gy = 0; gy < lattice_[1]; ++gy)
      for (int gx = 0; gx < lattice_[0]; ++gx) {
        const auto& wx = axis_[0][static_cast<std::size_t>(gx)];
        const auto& wy = axis_[1][static_cast<std::size_t>(gy)];
        const auto& wz = axis_[2][static_cast<std::size_t>(gz)];
        const double f = fine[static_cast<std::size_t>(gx + lattice_[0] * (gy + lattice_[1] * gz))];
        for (int c = 0; c < 2; ++c)
          for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a) {
              const int v = wx.vertex[static_cast<std::size_t>(a)] +
                            vertex_extent_[0] * (wy.vertex[static_cast<std::size_t>(b)] + vertex_extent_[1] * wz.vertex[static_cast<std::size_t>(c)]);
              coarse[static_cast<std::size_t>(v)] +=
                  wx.weight[static_cast<std::size_t>(a)] * wy.weight[static_cast<std::size_t>(b)] * wz.weight[static_cast<std::size_t>(c)] * f;
            }
      }
}

} // namespace semscale::solvers
