#include "semscale/mesh/numbering.hpp"

#include "semscale/error.hpp"
#include "semscale/sem/basis.hpp"

namespace semscale::mesh {

std::vector<int> GllNumbering::multiplicity() const {
  std::vector<int> m(static_cast<std::size_t>(num_global()), 0);
  for (int g : local_to_global) ++m[static_cast<std::size_t>(g)];
  return m;
}

GllNumbering build_numbering(const HexMesh& mesh, int n_per_dir) {
  if (n_per_dir < 2) throw InvalidArgument("build_numbering: n_per_dir must be >= 2");
  const auto [nodes, weights] = sem::gll_nodes_weights(n_per_dir);
  const int n = n_per_dir;

  GllNumbering num;
  num.n_per_dir = n;
  for (std::size_t d = 0; d < 3; ++d) {
    const int ed = mesh.extents[d];
    num.lattice[d] = ed * (n - 1) + (mesh.periodic[d] ? 0 : 1);
    const double h = mesh.element_size(static_cast<int>(d));
    auto& c = num.coords[d];
    c.resize(static_cast<std::size_t>(num.lattice[d]));
    for (int g = 0; g < num.lattice[d]; ++g) {
      const int ie = g / (n - 1);
      const int a = g % (n - 1);
      c[static_cast<std::size_t>(g)] = ie * h + 0.5 * (1.0 + nodes[static_cast<std::size_t>(a)]) * h;
    }
  }

  const auto ppe = static_cast<std::size_t>(n) * n * n;
  num.local_to_global.resize(ppe * static_cast<std::size_t>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto ijk = mesh.element_lattice(e);
    for (int c = 0; c < n; ++c)
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          int gx = ijk[0] * (n - 1) + a;
          int gy = ijk[1] * (n - 1) + b;
          int gz = ijk[2] * (n - 1) + c;
          gx %= num.lattice[0];
          gy %= num.lattice[1];
          gz %= num.lattice[2];
          num.local_to_global[static_cast<std::size_t>(e) * ppe + static_cast<std::size_t>(a + n * (b + n * c))] =
              gx + num.lattice[0] * (gy + num.lattice[1] * gz);
        }
  }
  return num;
}

} // namespace semscale::mesh
