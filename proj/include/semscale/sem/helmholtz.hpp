#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "semscale/sem/basis.hpp"

namespace semscale::sem {

/// Axis-aligned affine hexahedron; x = x0 + (1 + r) * hx / 2 along each axis.
struct ElementGeometry {
  double hx = 2.0, hy = 2.0, hz = 2.0;

  /// Throws InvalidArgument unless all extents are positive.
  ElementGeometry() = default;
  ElementGeometry(double hx, double hy, double hz);

  [[nodiscard]] double extent(int dim) const { return dim == 0 ? hx : (dim == 1 ? hy : hz); }
  [[nodiscard]] double jacobian() const { return hx * hy * hz / 8.0; }
  /// d r / d x along `dim`.
  [[nodiscard]] double inverse_map(int dim) const { return 2.0 / extent(dim); }
  /// Coefficient multiplying D^T W D along `dim` in the stiffness matrix: J (2/h)^2.
  [[nodiscard]] double stiffness_scale(int dim) const {
    const double g = inverse_map(dim);
    return jacobian() * g * g;
  }
};

/// H = h1 * A + h2 * B with A the stiffness and B the (diagonal GLL) mass matrix.
struct HelmholtzFactors {
  double h1 = 1.0;
  double h2 = 0.0;

  /// Pressure Poisson operator: (1, 0).
  static HelmholtzFactors pressure() { return {1.0, 0.0}; }
  /// Implicit velocity operator (1/Re) A + (b0/dt) B, symmetric positive definite
  /// for b0, dt, Re > 0. The mass sign follows from A being the positive stiffness.
  static HelmholtzFactors velocity(double reynolds, double b0, double dt);
};

/// Reusable element kernel: precomputed 3-D weights and scratch space.
/// Not thread-safe; give each execution context its own kernel.
class HelmholtzKernel {
public:
  explicit HelmholtzKernel(const ReferenceBasis& basis);

  /// out = (h1 A + h2 B) in for a single element.
  void apply(const HelmholtzFactors& factors, const ElementGeometry& geom, std::span<const double> in,
             std::span<double> out);

  /// Diagonal of (h1 A + h2 B) for one element.
  void diagonal(const HelmholtzFactors& factors, const ElementGeometry& geom, std::span<double> out) const;

  /// Collocated gradient component d/dx_dim of an element field.
  void gradient(const ElementGeometry& geom, int dim, std::span<const double> in, std::span<double> out);

  /// Weak divergence contribution: out += sum_d J (2/h_d) D_d^T (W * field_d).
  void weak_divergence(const ElementGeometry& geom, std::span<const double> fx, std::span<const double> fy,
                       std::span<const double> fz, std::span<double> out);

  [[nodiscard]] const ReferenceBasis& basis() const { return *basis_; }
  [[nodiscard]] std::span<const double> weights3d() const { return w3_; }

private:
  const ReferenceBasis* basis_;
  std::size_t n_;
  std::vector<double> w3_;
  std::array<std::vector<double>, 3> work_;
};

/// Applies (h1 A + h2 B) to one element field via tensor contractions
/// (the dense operator is never formed). Throws InvalidArgument on size mismatch.
std::vector<double> apply_helmholtz_local(const HelmholtzFactors& factors, const ElementGeometry& geometry,
                                          const ReferenceBasis& basis, std::span<const double> field);

enum class FlopKind {
  HelmholtzApply,  ///< full h1 A + h2 B with h2 != 0, per element (n = points per direction)
  StiffnessApply,  ///< h2 == 0, per element
  MassApply,       ///< h1 == 0, per element
  TensorContraction, ///< one n x n matrix applied along one axis of an n^3 field
  Axpy,            ///< vector of length n
  Dot,             ///< vector of length n
};

/// Parses "helmholtz_apply", "stiffness_apply", "mass_apply", "tensor_contraction", "axpy", "dot".
FlopKind parse_flop_kind(std::string_view name);

/// Arithmetic-operation count of the corresponding kernel loops.
std::uint64_t flop_count(std::uint64_t n, FlopKind kind);

/// Cost of HelmholtzKernel::apply for the given factors.
std::uint64_t helmholtz_flops(std::uint64_t n_per_dir, const HelmholtzFactors& factors);

/// Dot product whose arithmetic matches flop_count(n, FlopKind::Dot).
double dot(std::span<const double> a, std::span<const double> b);

} // namespace semscale::sem
