#include "semscale/solvers/schwarz.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>

#include "semscale/error.hpp"
#include "semscale/sem/tensor.hpp"

namespace semscale::solvers {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

} // namespace

CoarseBackend parse_coarse_backend(std::string_view name) {
  if (name == "none") return CoarseBackend::None;
  if (name == "xxt") return CoarseBackend::Xxt;
  if (name == "amg") return CoarseBackend::Amg;
  throw InvalidArgument("unknown coarse backend: " + std::string(name));
}

std::string_view to_string(CoarseBackend backend) {
  switch (backend) {
    case CoarseBackend::None: return "none";
    case CoarseBackend::Xxt: return "xxt";
    case CoarseBackend::Amg: return "amg";
  }
  return "none";
}

SchwarzPreconditioner::SchwarzPreconditioner(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering,
                                             const sem::ReferenceBasis& basis, sem::HelmholtzFactors factors,
                                             sim::Exec& exec, SchwarzOptions options)
    : mesh_(&mesh), num_(&numbering), factors_(factors), exec_(&exec), options_(options) {
  const int n = basis.n_per_dir;
  if (n != numbering.n_per_dir) throw InvalidArgument("SchwarzPreconditioner: basis and numbering disagree");

  // Assembled 1-D operators: stiffness (2/h) D^T W D and mass (h/2) W per element.
  for (int d = 0; d < 3; ++d) {
    const auto du = static_cast<std::size_t>(d);
    const int g = numbering.lattice[du];
    const double h = mesh.element_size(d);
    auto& k = k1d_[du];
    auto& m = m1d_[du];
    k.assign(static_cast<std::size_t>(g) * static_cast<std::size_t>(g), 0.0);
    m.assign(static_cast<std::size_t>(g), 0.0);
    for (int e = 0; e < mesh.extents[du]; ++e)
      for (int a = 0; a < n; ++a) {
        const int ga = (e * (n - 1) + a) % g;
        m[static_cast<std::size_t>(ga)] += 0.5 * h * basis.weights[static_cast<std::size_t>(a)];
        for (int b = 0; b < n; ++b) {
          const int gb = (e * (n - 1) + b) % g;
          double s = 0.0;
          for (int q = 0; q < n; ++q) s += basis.d(q, a) * basis.weights[static_cast<std::size_t>(q)] * basis.d(q, b);
          k[static_cast<std::size_t>(ga) * static_cast<std::size_t>(g) + static_cast<std::size_t>(gb)] += 2.0 / h * s;
        }
      }
  }

  windows_.resize(static_cast<std::size_t>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto ijk = mesh.element_lattice(e);
    for (int d = 0; d < 3; ++d) {
      const auto du = static_cast<std::size_t>(d);
      const int g = numbering.lattice[du];
      const int start = ijk[du] * (n - 1) - 1;
      const int stop = ijk[du] * (n - 1) + n;  // inclusive
      auto& ax = windows_[static_cast<std::size_t>(e)].axis[du];
      bool clip_lo = false, clip_hi = false;
      for (int i = start; i <= stop; ++i) {
        int gi = i;
        if (mesh.periodic[du]) {
          gi = ((i % g) + g) % g;
        } else if (i < 0) {
          clip_lo = true;
          continue;
        } else if (i >= g) {
          clip_hi = true;
          continue;
        }
        if (std::find(ax.index.begin(), ax.index.end(), gi) == ax.index.end()) ax.index.push_back(gi);
      }
      ax.key = static_cast<int>(ax.index.size()) * 4 + (clip_lo ? 2 : 0) + (clip_hi ? 1 : 0);
    }
  }

  if (options_.coarse != CoarseBackend::None) {
    a0_ = coarse_assemble(mesh);
    transfer_ = std::make_unique<CoarseTransfer>(mesh, numbering);
    const mesh::HexMesh* mp = &mesh;
    if (options_.coarse == CoarseBackend::Xxt) {
      xxt_ = std::make_shared<XxtSolver>(a0_, mesh.vertices);
      auto solver = xxt_;
      plan_id_ = exec.register_plan([solver, mp](const mesh::Partition& p, const sim::GatherScatterSchedule&) {
        return solver->comm_plan(vertex_owners(*mp, p), p.num_ranks);
      });
    } else {
      amg_ = std::make_shared<AmgHierarchy>(a0_, options_.amg);
      auto solver = amg_;
      plan_id_ = exec.register_plan([solver, mp](const mesh::Partition& p, const sim::GatherScatterSchedule&) {
        return solver->comm_plan(vertex_owners(*mp, p), p.num_ranks);
      });
    }
  }
}

const SchwarzPreconditioner::Fdm1d& SchwarzPreconditioner::fdm(int dim, const Axis& axis) {
  auto& cache = fdm_cache_[static_cast<std::size_t>(dim)];
  auto it = cache.find(axis.key);
  if (it != cache.end()) return it->second;
  const auto du = static_cast<std::size_t>(dim);
  const auto g = static_cast<std::size_t>(num_->lattice[du]);
  const auto m = static_cast<Eigen::Index>(axis.index.size());
  Eigen::MatrixXd kk(m, m);
  Eigen::VectorXd minv_sqrt(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto gi = static_cast<std::size_t>(axis.index[static_cast<std::size_t>(i)]);
    minv_sqrt[i] = 1.0 / std::sqrt(m1d_[du][gi]);
    for (Eigen::Index j = 0; j < m; ++j)
      kk(i, j) = k1d_[du][gi * g + static_cast<std::size_t>(axis.index[static_cast<std::size_t>(j)])];
  }
  const Eigen::MatrixXd scaled = minv_sqrt.asDiagonal() * (0.5 * (kk + kk.transpose())) * minv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled);
  const Eigen::MatrixXd s = minv_sqrt.asDiagonal() * es.eigenvectors();
  Fdm1d f;
  f.m = static_cast<int>(m);
  f.s.resize(static_cast<std::size_t>(m * m));
  f.st.resize(f.s.size());
  f.lambda.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    f.lambda[static_cast<std::size_t>(i)] = std::max(0.0, es.eigenvalues()[i]);
    for (Eigen::Index j = 0; j < m; ++j) {
      f.s[static_cast<std::size_t>(i * m + j)] = s(i, j);
      f.st[static_cast<std::size_t>(j * m + i)] = s(i, j);
    }
  }
  return cache.emplace(axis.key, std::move(f)).first->second;
}

const SchwarzPreconditioner::DenseBlock& SchwarzPreconditioner::dense_block(const Window& w) {
  const BlockKey key{w.axis[0].key, w.axis[1].key, w.axis[2].key};
  auto it = dense_cache_.find(key);
  if (it != dense_cache_.end()) return it->second;
  std::array<Eigen::MatrixXd, 3> k, m;
  std::array<int, 3> sz{};
  for (std::size_t d = 0; d < 3; ++d) {
    const auto& idx = w.axis[d].index;
    const auto md = static_cast<Eigen::Index>(idx.size());
    const auto g = static_cast<std::size_t>(num_->lattice[d]);
    sz[d] = static_cast<int>(md);
    k[d].resize(md, md);
    m[d] = Eigen::MatrixXd::Zero(md, md);
    for (Eigen::Index i = 0; i < md; ++i) {
      m[d](i, i) = m1d_[d][static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      for (Eigen::Index j = 0; j < md; ++j)
        k[d](i, j) = k1d_[d][static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]) * g + static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
    }
  }
  auto kron3 = [](const Eigen::MatrixXd& z, const Eigen::MatrixXd& y, const Eigen::MatrixXd& x) {
    // Index p = a + mx (b + my c): x fastest, so the Kronecker order is z (x) y (x) x.
    const Eigen::Index mx = x.rows(), my = y.rows(), mz = z.rows();
    Eigen::MatrixXd out(mx * my * mz, mx * my * mz);
    for (Eigen::Index c = 0; c < mz; ++c)
      for (Eigen::Index cc = 0; cc < mz; ++cc)
        for (Eigen::Index b = 0; b < my; ++b)
          for (Eigen::Index bb = 0; bb < my; ++bb)
            out.block(mx * (b + my * c), mx * (bb + my * cc), mx, mx) = z(c, cc) * y(b, bb) * x;
    return out;
  };
  const Eigen::MatrixXd a = factors_.h1 * (kron3(m[2], m[1], k[0]) + kron3(m[2], k[1], m[0]) + kron3(k[2], m[1], m[0])) +
                            factors_.h2 * kron3(m[2], m[1], m[0]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::VectorXd inv(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv[i] = es.eigenvalues()[i] > 1e-12 * top ? 1.0 / es.eigenvalues()[i] : 0.0;
  const Eigen::MatrixXd ainv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  DenseBlock blk;
  blk.m = sz;
  const auto dim = static_cast<std::size_t>(ainv.rows());
  blk.inv.resize(dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      blk.inv[i * dim + j] = ainv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return dense_cache_.emplace(key, std::move(blk)).first->second;
}

void SchwarzPreconditioner::local_solve(const Window& w, std::span<const double> in, std::span<double> out) {
  if (options_.local == LocalSolver::Dense) {
    const auto& blk = dense_block(w);
    const std::size_t size = in.size();
    for (std::size_t i = 0; i < size; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < size; ++j) s += blk.inv[i * size + j] * in[j];
      out[i] = s;
    }
    return;
  }
  const Fdm1d* f[3] = {&fdm(0, w.axis[0]), &fdm(1, w.axis[1]), &fdm(2, w.axis[2])};
  const sem::Shape3 shape{static_cast<std::size_t>(f[0]->m), static_cast<std::size_t>(f[1]->m), static_cast<std::size_t>(f[2]->m)};
  work_a_.resize(shape.size());
  work_b_.resize(shape.size());
  // out = (S (x) S (x) S) D^+ (S^T (x) S^T (x) S^T) in
  sem::contract(f[0]->st, shape.nx, 0, shape, in, work_a_);
  sem::contract(f[1]->st, shape.ny, 1, shape, work_a_, work_b_);
  sem::contract(f[2]->st, shape.nz, 2, shape, work_b_, work_a_);
  double dmax = 0.0;
  for (std::size_t c = 0; c < shape.nz; ++c)
    for (std::size_t b = 0; b < shape.ny; ++b)
      for (std::size_t a = 0; a < shape.nx; ++a)
        dmax = std::max(dmax, factors_.h1 * (f[0]->lambda[a] + f[1]->lambda[b] + f[2]->lambda[c]) + factors_.h2);
  for (std::size_t c = 0; c < shape.nz; ++c)
    for (std::size_t b = 0; b < shape.ny; ++b)
      for (std::size_t a = 0; a < shape.nx; ++a) {
        const double dv = factors_.h1 * (f[0]->lambda[a] + f[1]->lambda[b] + f[2]->lambda[c]) + factors_.h2;
        auto& v = work_a_[a + shape.nx * (b + shape.ny * c)];
        v = dv > 1e-12 * dmax ? v / dv : 0.0;
      }
  sem::contract(f[0]->s, shape.nx, 0, shape, work_a_, work_b_);
  sem::contract(f[1]->s, shape.ny, 1, shape, work_b_, work_a_);
  sem::contract(f[2]->s, shape.nz, 2, shape, work_a_, out);
}

std::vector<int> SchwarzPreconditioner::subdomain_points(int k) const {
  const auto& w = windows_.at(static_cast<std::size_t>(k));
  std::vector<int> pts;
  for (int gz : w.axis[2].index)
    for (int gy : w.axis[1].index)
      for (int gx : w.axis[0].index) pts.push_back(gx + num_->lattice[0] * (gy + num_->lattice[1] * gz));
  return pts;
}

std::string SchwarzPreconditioner::coarse_site() const { return "coarse_" + std::string(to_string(options_.coarse)); }

void SchwarzPreconditioner::coarse_solve(std::span<const double> b0, std::span<double> x0) const {
  if (xxt_) {
    xxt_->solve(b0, x0);
  } else if (amg_) {
    amg_->vcycle(b0, x0);
  } else {
    std::fill(x0.begin(), x0.end(), 0.0);
  }
}

void SchwarzPreconditioner::apply(std::span<const double> r, std::span<double> z) {
  const auto ng = static_cast<std::size_t>(num_->num_global());
  if (r.size() != ng || z.size() != ng) throw InvalidArgument("SchwarzPreconditioner::apply: size mismatch");
  std::fill(z.begin(), z.end(), 0.0);

  exec_->charge_exchange("schwarz");
  const auto t0 = Clock::now();
  double flops = 0.0;
  for (const auto& w : windows_) {
    const auto pts = subdomain_points(static_cast<int>(&w - windows_.data()));
    work_in_.resize(pts.size());
    work_out_.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) work_in_[i] = r[static_cast<std::size_t>(pts[i])];
    local_solve(w, work_in_, work_out_);
    for (std::size_t i = 0; i < pts.size(); ++i) z[static_cast<std::size_t>(pts[i])] += work_out_[i];
    const double mx = static_cast<double>(w.axis[0].index.size()), my = static_cast<double>(w.axis[1].index.size()),
                 mz = static_cast<double>(w.axis[2].index.size());
    const double vol = mx * my * mz;
    flops += options_.local == LocalSolver::Dense ? 2.0 * vol * vol : 4.0 * vol * (mx + my + mz) + 2.0 * vol;
  }
  exec_->charge_elements(flops / static_cast<double>(windows_.size()), seconds_since(t0), "schwarz");
  exec_->charge_exchange("schwarz");

  if (options_.coarse == CoarseBackend::None) return;
  const auto t1 = Clock::now();
  std::vector<double> r0(static_cast<std::size_t>(a0_.n)), x0(r0.size());
  transfer_->restrict_to(r, r0);
  exec_->charge_points(16.0, seconds_since(t1), "coarse_transfer");
  const auto t2 = Clock::now();
  coarse_solve(r0, x0);
  exec_->charge_plan(plan_id_, seconds_since(t2), coarse_site());
  const auto t3 = Clock::now();
  transfer_->prolong(x0, z);
  exec_->charge_points(16.0, seconds_since(t3), "coarse_transfer");
}

LinearMap SchwarzPreconditioner::map() {
  return [this](std::span<const double> r, std::span<double> z) { apply(r, z); };
}

} // namespace semscale::solvers
