#include "semscale/sem/helmholtz.hpp"

#include <string>

#include "semscale/error.hpp"
#include "semscale/sem/tensor.hpp"

namespace semscale::sem {

ElementGeometry::ElementGeometry(double hx_, double hy_, double hz_) : hx(hx_), hy(hy_), hz(hz_) {
  if (!(hx > 0.0 && hy > 0.0 && hz > 0.0)) throw InvalidArgument("ElementGeometry: extents must be positive");
}

HelmholtzFactors HelmholtzFactors::velocity(double reynolds, double b0, double dt) {
  if (!(reynolds > 0.0) || !(dt > 0.0)) throw InvalidArgument("HelmholtzFactors::velocity: Re and dt must be > 0");
  return {1.0 / reynolds, b0 / dt};
}

HelmholtzKernel::HelmholtzKernel(const ReferenceBasis& basis)
    : basis_(&basis), n_(static_cast<std::size_t>(basis.n_per_dir)) {
  const std::size_t n = n_;
  w3_.resize(n * n * n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t a = 0; a < n; ++a)
        w3_[a + n * (b + n * c)] = basis.weights[a] * basis.weights[b] * basis.weights[c];
  for (auto& w : work_) w.resize(n * n * n);
}

void HelmholtzKernel::apply(const HelmholtzFactors& factors, const ElementGeometry& geom, std::span<const double> in,
                            std::span<double> out) {
  const std::size_t np = w3_.size();
  if (in.size() != np || out.size() != np) throw InvalidArgument("HelmholtzKernel::apply: field size mismatch");

  if (factors.h1 != 0.0) {
    const auto& b = *basis_;
    for (int d = 0; d < 3; ++d) contract_cube(b.diff_matrix, n_, d, in, work_[d]);
    for (int d = 0; d < 3; ++d) {
      const double c = factors.h1 * geom.stiffness_scale(d);
      double* g = work_[d].data();
      for (std::size_t p = 0; p < np; ++p) g[p] *= c * w3_[p];
    }
    contract_cube(b.diff_matrix_t, n_, 0, work_[0], out, false);
    contract_cube(b.diff_matrix_t, n_, 1, work_[1], out, true);
    contract_cube(b.diff_matrix_t, n_, 2, work_[2], out, true);
    if (factors.h2 != 0.0) {
      const double cm = factors.h2 * geom.jacobian();
      for (std::size_t p = 0; p < np; ++p) out[p] += cm * w3_[p] * in[p];
    }
  } else {
    const double cm = factors.h2 * geom.jacobian();
    for (std::size_t p = 0; p < np; ++p) out[p] = cm * w3_[p] * in[p];
  }
}

void HelmholtzKernel::diagonal(const HelmholtzFactors& factors, const ElementGeometry& geom,
                               std::span<double> out) const {
  const std::size_t n = n_;
  if (out.size() != w3_.size()) throw InvalidArgument("HelmholtzKernel::diagonal: size mismatch");
  const auto& b = *basis_;
  // A_pp = sum_d s_d sum_q W_q D(q_d, p_d)^2 with q ranging along direction d only.
  std::vector<double> dd(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t q = 0; q < n; ++q) s += b.weights[q] * b.d(static_cast<int>(q), static_cast<int>(i)) *
                                             b.d(static_cast<int>(q), static_cast<int>(i));
    dd[i] = s;
  }
  const double sx = geom.stiffness_scale(0), sy = geom.stiffness_scale(1), sz = geom.stiffness_scale(2);
  const double cm = factors.h2 * geom.jacobian();
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t bb = 0; bb < n; ++bb)
      for (std::size_t a = 0; a < n; ++a) {
        const double wa = b.weights[a], wb = b.weights[bb], wc = b.weights[c];
        const double stiff = sx * dd[a] * wb * wc + sy * wa * dd[bb] * wc + sz * wa * wb * dd[c];
        out[a + n * (bb + n * c)] = factors.h1 * stiff + cm * wa * wb * wc;
      }
}

void HelmholtzKernel::gradient(const ElementGeometry& geom, int dim, std::span<const double> in,
                               std::span<double> out) {
  contract_cube(basis_->diff_matrix, n_, dim, in, out);
  const double g = geom.inverse_map(dim);
  for (auto& v : out) v *= g;
}

void HelmholtzKernel::weak_divergence(const ElementGeometry& geom, std::span<const double> fx,
                                      std::span<const double> fy, std::span<const double> fz,
                                      std::span<double> out) {
  const std::size_t np = w3_.size();
  const std::array<std::span<const double>, 3> f{fx, fy, fz};
  for (int d = 0; d < 3; ++d) {
    const double c = geom.jacobian() * geom.inverse_map(d);
    for (std::size_t p = 0; p < np; ++p) work_[d][p] = c * w3_[p] * f[static_cast<std::size_t>(d)][p];
    contract_cube(basis_->diff_matrix_t, n_, d, work_[d], out, true);
  }
}

std::vector<double> apply_helmholtz_local(const HelmholtzFactors& factors, const ElementGeometry& geometry,
                                          const ReferenceBasis& basis, std::span<const double> field) {
  if (field.size() != basis.points_per_element())
    throw InvalidArgument("apply_helmholtz_local: field must have n_per_dir^3 entries");
  HelmholtzKernel kernel(basis);
  std::vector<double> out(field.size());
  kernel.apply(factors, geometry, field, out);
  return out;
}

FlopKind parse_flop_kind(std::string_view name) {
  if (name == "helmholtz_apply") return FlopKind::HelmholtzApply;
  if (name == "stiffness_apply") return FlopKind::StiffnessApply;
  if (name == "mass_apply") return FlopKind::MassApply;
  if (name == "tensor_contraction") return FlopKind::TensorContraction;
  if (name == "axpy") return FlopKind::Axpy;
  if (name == "dot") return FlopKind::Dot;
  throw InvalidArgument("unknown flop kind: " + std::string(name));
}

std::uint64_t flop_count(std::uint64_t n, FlopKind kind) {
  const std::uint64_t n3 = n * n * n;
  const std::uint64_t n4 = n3 * n;
  switch (kind) {
  case FlopKind::TensorContraction: return 2 * n4;
  // 3 gradient + 3 transposed contractions, 2 flops/point/direction scaling
  case FlopKind::StiffnessApply: return 12 * n4 + 6 * n3;
  case FlopKind::HelmholtzApply: return 12 * n4 + 6 * n3 + 3 * n3;
  case FlopKind::MassApply: return 2 * n3;
  case FlopKind::Axpy: return 2 * n;
  case FlopKind::Dot: return n == 0 ? 0 : 2 * n - 1;
  }
  throw InvalidArgument("flop_count: unknown kind");
}

std::uint64_t helmholtz_flops(std::uint64_t n_per_dir, const HelmholtzFactors& factors) {
  if (factors.h1 == 0.0) return flop_count(n_per_dir, FlopKind::MassApply);
  return flop_count(n_per_dir, factors.h2 != 0.0 ? FlopKind::HelmholtzApply : FlopKind::StiffnessApply);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("dot: size mismatch");
  if (a.empty()) return 0.0;
  double acc = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

} // namespace semscale::sem
