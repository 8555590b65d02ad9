#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "semscale/mesh/hex_mesh.hpp"
#include "semscale/mesh/numbering.hpp"
#include "semscale/sem/basis.hpp"
#include "semscale/sem/helmholtz.hpp"
#include "semscale/sim/cluster.hpp"
#include "semscale/solvers/amg.hpp"
#include "semscale/solvers/coarse.hpp"
#include "semscale/solvers/krylov.hpp"
#include "semscale/solvers/xxt.hpp"

namespace semscale::solvers {

enum class CoarseBackend { None, Xxt, Amg };

/// "none", "xxt" or "amg"; throws InvalidArgument otherwise.
CoarseBackend parse_coarse_backend(std::string_view name);
std::string_view to_string(CoarseBackend backend);

enum class LocalSolver {
  FastDiagonalization,  ///< separable eigen-decomposition of the tensor-product block
  Dense,                ///< explicit block inverse, one per distinct block shape
};

struct SchwarzOptions {
  CoarseBackend coarse = CoarseBackend::Xxt;
  LocalSolver local = LocalSolver::FastDiagonalization;
  AmgOptions amg{};
};

/// Additive overlapping Schwarz: z = R0^T A0^{-1} R0 r + sum_k R_k^T A_k^{-1} R_k r.
///
/// Subdomain k is element k extended by one GLL point in each direction
/// (clipped at non-periodic boundaries). On these tensor-product meshes the
/// assembled operator is a Kronecker sum of 1-D assembled matrices, so each
/// A_k is the exact principal submatrix of the global operator. Blocks that
/// are singular (pure Neumann or fully periodic, h2 = 0) are pseudo-inverted.
class SchwarzPreconditioner {
public:
  SchwarzPreconditioner(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering,
                        const sem::ReferenceBasis& basis, sem::HelmholtzFactors factors, sim::Exec& exec,
                        SchwarzOptions options = {});

  void apply(std::span<const double> r, std::span<double> z);
  [[nodiscard]] LinearMap map();

  [[nodiscard]] int num_subdomains() const { return static_cast<int>(windows_.size()); }
  /// Global points of subdomain k, in block order (x fastest).
  [[nodiscard]] std::vector<int> subdomain_points(int k) const;
  [[nodiscard]] const CsrMatrix& coarse_matrix() const { return a0_; }
  [[nodiscard]] const CoarseTransfer& transfer() const { return *transfer_; }
  [[nodiscard]] CoarseBackend backend() const { return options_.coarse; }
  [[nodiscard]] const XxtSolver* xxt() const { return xxt_.get(); }
  [[nodiscard]] const AmgHierarchy* amg() const { return amg_.get(); }
  /// x0 = A0^{-1} b0 with the configured backend (zero for None).
  void coarse_solve(std::span<const double> b0, std::span<double> x0) const;
  [[nodiscard]] std::string coarse_site() const;

private:
  struct Axis {
    std::vector<int> index;  // global lattice indices along this axis
    int key = 0;
  };
  struct Window {
    std::array<Axis, 3> axis;
  };
  struct Fdm1d {
    int m = 0;
    std::vector<double> s;    // row-major m x m
    std::vector<double> st;   // transpose
    std::vector<double> lambda;
  };
  struct DenseBlock {
    std::array<int, 3> m{};
    std::vector<double> inv;  // row-major
  };
  using BlockKey = std::tuple<int, int, int>;

  const Fdm1d& fdm(int dim, const Axis& axis);
  const DenseBlock& dense_block(const Window& w);
  void local_solve(const Window& w, std::span<const double> in, std::span<double> out);

  const mesh::HexMesh* mesh_;
  const mesh::GllNumbering* num_;
  sem::HelmholtzFactors factors_;
  sim::Exec* exec_;
  SchwarzOptions options_;
  std::array<std::vector<double>, 3> k1d_;  // dense assembled 1-D stiffness, G x G
  std::array<std::vector<double>, 3> m1d_;  // assembled 1-D mass (diagonal)
  std::vector<Window> windows_;
  std::array<std::map<int, Fdm1d>, 3> fdm_cache_;
  std::map<BlockKey, DenseBlock> dense_cache_;
  CsrMatrix a0_;
  std::unique_ptr<CoarseTransfer> transfer_;
  std::shared_ptr<XxtSolver> xxt_;
  std::shared_ptr<AmgHierarchy> amg_;
  int plan_id_ = -1;
  std::vector<double> work_in_, work_out_, work_a_, work_b_;
};

} // namespace semscale::solvers
