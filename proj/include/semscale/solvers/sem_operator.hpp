#pragma once

#include <span>
#include <string>
#include <vector>

#include "semscale/mesh/hex_mesh.hpp"
#include "semscale/mesh/numbering.hpp"
#include "semscale/sem/helmholtz.hpp"
#include "semscale/sim/cluster.hpp"
#include "semscale/solvers/krylov.hpp"

namespace semscale::solvers {

/// Assembled h1 A + h2 B acting on vectors of global GLL points.
class SemOperator {
public:
  SemOperator(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering, const sem::ReferenceBasis& basis,
              sem::HelmholtzFactors factors, sim::Exec& exec, std::string site);

  void apply(std::span<const double> x, std::span<double> y);
  [[nodiscard]] LinearMap map();

  /// Assembled diagonal, for Jacobi preconditioning.
  [[nodiscard]] std::vector<double> diagonal() const;
  void set_factors(sem::HelmholtzFactors factors) { factors_ = factors; }
  [[nodiscard]] const sem::HelmholtzFactors& factors() const { return factors_; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(num_->num_global()); }

  /// Element-local copy of a global vector (E n^3 values).
  void scatter(std::span<const double> global, std::span<double> local) const;

  [[nodiscard]] const mesh::HexMesh& mesh() const { return *mesh_; }
  [[nodiscard]] const mesh::GllNumbering& numbering() const { return *num_; }
  [[nodiscard]] sim::Exec& exec() const { return *exec_; }

private:
  const mesh::HexMesh* mesh_;
  const mesh::GllNumbering* num_;
  const sem::ReferenceBasis* basis_;
  sem::HelmholtzFactors factors_;
  sim::Exec* exec_;
  std::string site_;
  sem::HelmholtzKernel kernel_;
  sem::ElementGeometry geom_;
  std::vector<double> in_local_, out_local_;
};

/// Assembled diagonal GLL mass matrix.
std::vector<double> assembled_mass(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering,
                                   const sem::ReferenceBasis& basis);

/// Interpolates a pointwise function onto the global GLL points.
template <class F>
std::vector<double> interpolate(const mesh::GllNumbering& numbering, F&& f) {
  std::vector<double> v(static_cast<std::size_t>(numbering.num_global()));
  for (int g = 0; g < numbering.num_global(); ++g) {
    const auto p = numbering.point(g);
    v[static_cast<std::size_t>(g)] = f(p[0], p[1], p[2]);
  }
  return v;
}

/// Subtracts the arithmetic mean so that sum(v) = 0.
void remove_mean(std::span<double> v);

} // namespace semscale::solvers
