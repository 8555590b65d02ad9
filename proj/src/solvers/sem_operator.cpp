#include "semscale/solvers/sem_operator.hpp"

#include <chrono>
#include <numeric>

#include "semscale/error.hpp"

namespace semscale::solvers {

SemOperator::SemOperator(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering,
                         const sem::ReferenceBasis& basis, sem::HelmholtzFactors factors, sim::Exec& exec,
                         std::string site)
    : mesh_(&mesh), num_(&numbering), basis_(&basis), factors_(factors), exec_(&exec), site_(std::move(site)),
      kernel_(basis), geom_(mesh.geometry()), in_local_(numbering.num_local()), out_local_(numbering.num_local()) {
  if (basis.n_per_dir != numbering.n_per_dir) throw InvalidArgument("SemOperator: basis and numbering disagree");
}

void SemOperator::scatter(std::span<const double> global, std::span<double> local) const {
  for (std::size_t l = 0; l < local.size(); ++l) local[l] = global[static_cast<std::size_t>(num_->local_to_global[l])];
}

void SemOperator::apply(std::span<const double> x, std::span<double> y) {
  if (x.size() != size() || y.size() != size()) throw InvalidArgument("SemOperator::apply: size mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  scatter(x, in_local_);
  const std::size_t ppe = num_->points_per_element();
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    const auto off = static_cast<std::size_t>(e) * ppe;
    kernel_.apply(factors_, geom_, std::span<const double>(in_local_).subspan(off, ppe),
                  std::span<double>(out_local_).subspan(off, ppe));
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  exec_->charge_elements(static_cast<double>(sem::helmholtz_flops(static_cast<std::uint64_t>(basis_->n_per_dir), factors_)),
                         seconds, site_);
  exec_->assemble(out_local_, y, site_);
}

LinearMap SemOperator::map() {
  return [this](std::span<const double> x, std::span<double> y) { apply(x, y); };
}

std::vector<double> SemOperator::diagonal() const {
  sem::HelmholtzKernel k(*basis_);
  const std::size_t ppe = num_->points_per_element();
  std::vector<double> d(ppe), out(size(), 0.0);
  k.diagonal(factors_, geom_, d);
  for (std::size_t l = 0; l < num_->num_local(); ++l) out[static_cast<std::size_t>(num_->local_to_global[l])] += d[l % ppe];
  return out;
}

std::vector<double> assembled_mass(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering,
                                   const sem::ReferenceBasis& basis) {
  sem::HelmholtzKernel k(basis);
  const std::size_t ppe = numbering.points_per_element();
  std::vector<double> d(ppe), out(static_cast<std::size_t>(numbering.num_global()), 0.0);
  k.diagonal({0.0, 1.0}, mesh.geometry(), d);
  for (std::size_t l = 0; l < numbering.num_local(); ++l)
    out[static_cast<std::size_t>(numbering.local_to_global[l])] += d[l % ppe];
  return out;
}

void remove_mean(std::span<double> v) {
  if (v.empty()) return;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

} // namespace semscale::solvers
