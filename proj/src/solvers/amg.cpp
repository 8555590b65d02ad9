#include "semscale/solvers/amg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "semscale/error.hpp"

namespace semscale::solvers {

namespace {

std::vector<double> inverse_diagonal(const CsrMatrix& a) {
  auto d = a.diagonal();
  for (double& v : d) {
    if (!(v > 0.0)) throw FactorizationError("AmgHierarchy: non-positive diagonal entry");
    v = 1.0 / v;
  }
  return d;
}

/// Greedy aggregation: seeds in index order collect their strongest
/// unaggregated neighbours; leftovers join the neighbouring aggregate they
/// are most strongly coupled to.
std::vector<int> aggregate(const CsrMatrix& a, int target, std::vector<int>& seeds) {
  const auto n = static_cast<std::size_t>(a.n);
  std::vector<int> agg(n, -1);
  int next = 0;
  for (int i = 0; i < a.n; ++i) {
    if (agg[static_cast<std::size_t>(i)] >= 0) continue;
    std::vector<std::pair<double, int>> nb;
    bool any_aggregated_neighbor = false;
    for (int k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = a.col[static_cast<std::size_t>(k)];
      if (j == i || a.val[static_cast<std::size_t>(k)] == 0.0) continue;
      if (agg[static_cast<std::size_t>(j)] >= 0) {
        any_aggregated_neighbor = true;
        continue;
      }
      nb.emplace_back(-std::abs(a.val[static_cast<std::size_t>(k)]), j);
    }
    if (nb.empty() && any_aggregated_neighbor) continue;  // leftover, handled below
    std::sort(nb.begin(), nb.end());
    agg[static_cast<std::size_t>(i)] = next;
    seeds.push_back(i);
    for (std::size_t k = 0; k < nb.size() && static_cast<int>(k) + 1 < target; ++k) agg[static_cast<std::size_t>(nb[k].second)] = next;
    ++next;
  }
  for (int i = 0; i < a.n; ++i) {
    if (agg[static_cast<std::size_t>(i)] >= 0) continue;
    double best = -1.0;
    int best_agg = -1;
    for (int k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = a.col[static_cast<std::size_t>(k)];
      const int aj = agg[static_cast<std::size_t>(j)];
      if (j == i || aj < 0) continue;
      const double w = std::abs(a.val[static_cast<std::size_t>(k)]);
      if (w > best) {
        best = w;
        best_agg = aj;
      }
    }
    if (best_agg < 0) {
      best_agg = next++;
      seeds.push_back(i);
    }
    agg[static_cast<std::size_t>(i)] = best_agg;
  }
  return agg;
}

/// C = P^T A P with P given as CSR rows over coarse columns.
CsrMatrix galerkin(const CsrMatrix& a, const CsrMatrix& p, int nc) {
  std::vector<Triplet> t;
  // (A P) row by row, then scatter with P^T.
  std::map<int, double> ap_row;
  for (int i = 0; i < a.n; ++i) {
    ap_row.clear();
    for (int k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = a.col[static_cast<std::size_t>(k)];
      const double aij = a.val[static_cast<std::size_t>(k)];
      for (int q = p.row_ptr[static_cast<std::size_t>(j)]; q < p.row_ptr[static_cast<std::size_t>(j) + 1]; ++q)
        ap_row[p.col[static_cast<std::size_t>(q)]] += aij * p.val[static_cast<std::size_t>(q)];
    }
    for (int q = p.row_ptr[static_cast<std::size_t>(i)]; q < p.row_ptr[static_cast<std::size_t>(i) + 1]; ++q)
      for (const auto& [c, v] : ap_row) t.push_back({p.col[static_cast<std::size_t>(q)], c, p.val[static_cast<std::size_t>(q)] * v});
  }
  auto c = CsrMatrix::from_triplets(nc, t);
  // Symmetrize away roundoff.
  std::vector<Triplet> s;
  for (int i = 0; i < c.n; ++i)
    for (int k = c.row_ptr[static_cast<std::size_t>(i)]; k < c.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      s.push_back({i, c.col[static_cast<std::size_t>(k)], 0.5 * c.val[static_cast<std::size_t>(k)]});
      s.push_back({c.col[static_cast<std::size_t>(k)], i, 0.5 * c.val[static_cast<std::size_t>(k)]});
    }
  return CsrMatrix::from_triplets(nc, s);
}

void jacobi_sweep(const CsrMatrix& a, const std::vector<double>& inv_diag, double omega, std::span<const double> b,
                  std::span<double> x) {
  std::vector<double> ax(x.size());
  a.apply(x, ax);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += omega * inv_diag[i] * (b[i] - ax[i]);
}

} // namespace

AmgHierarchy::AmgHierarchy(const CsrMatrix& a, AmgOptions options) : options_(options) {
  if (a.n < 1) throw InvalidArgument("AmgHierarchy: empty matrix");
  if (options.aggregate_size < 2 || options.max_coarse < 1) throw InvalidArgument("AmgHierarchy: bad options");
  CsrMatrix cur = a;
  while (cur.n > options.max_coarse && static_cast<int>(levels_.size()) + 1 < options.max_levels) {
    AmgLevel lvl;
    lvl.inv_diag = inverse_diagonal(cur);
    std::vector<int> seeds;
    lvl.aggregate = aggregate(cur, options.aggregate_size, seeds);
    lvl.num_coarse = static_cast<int>(seeds.size());
    if (lvl.num_coarse >= cur.n) break;
    std::vector<Triplet> pt;
    for (int i = 0; i < cur.n; ++i) pt.push_back({i, lvl.aggregate[static_cast<std::size_t>(i)], 1.0});
    CsrMatrix p = CsrMatrix::from_triplets(cur.n, pt);
    if (options.smoothed) {
      // P = (I - w D^{-1} A) P_tent
      std::vector<Triplet> sp;
      for (int i = 0; i < cur.n; ++i) {
        sp.push_back({i, lvl.aggregate[static_cast<std::size_t>(i)], 1.0});
        for (int k = cur.row_ptr[static_cast<std::size_t>(i)]; k < cur.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
          const int j = cur.col[static_cast<std::size_t>(k)];
          sp.push_back({i, lvl.aggregate[static_cast<std::size_t>(j)],
                        -options.jacobi_weight * lvl.inv_diag[static_cast<std::size_t>(i)] * cur.val[static_cast<std::size_t>(k)]});
        }
      }
      p = CsrMatrix::from_triplets(cur.n, sp);
    }
    lvl.p = p;
    CsrMatrix next = galerkin(cur, p, lvl.num_coarse);
    lvl.a = std::move(cur);
    levels_.push_back(std::move(lvl));
    seeds_.push_back(std::move(seeds));
    cur = std::move(next);
  }
  coarse_a_ = std::move(cur);
  if (coarse_a_.n > 1 || levels_.empty()) (void)inverse_diagonal(coarse_a_);

  const auto nc = static_cast<Eigen::Index>(coarse_a_.n);
  const auto dense = coarse_a_.dense();
  Eigen::MatrixXd m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(dense.data(), nc, nc);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const auto& ev = es.eigenvalues();
  const double scale = std::max(std::abs(ev.maxCoeff()), std::abs(ev.minCoeff()));
  if (ev.minCoeff() < -1e-10 * scale) throw FactorizationError("AmgHierarchy: coarsest operator is indefinite");
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(nc);
  for (Eigen::Index i = 0; i < nc; ++i)
    if (ev[i] > 1e-10 * scale) inv[i] = 1.0 / ev[i];
  const Eigen::MatrixXd pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  coarse_pinv_.resize(static_cast<std::size_t>(nc * nc));
  for (Eigen::Index i = 0; i < nc; ++i)
    for (Eigen::Index j = 0; j < nc; ++j) coarse_pinv_[static_cast<std::size_t>(i * nc + j)] = 0.5 * (pinv(i, j) + pinv(j, i));
}

std::vector<int> AmgHierarchy::level_sizes() const {
  std::vector<int> s;
  for (const auto& l : levels_) s.push_back(l.a.n);
  s.push_back(coarse_a_.n);
  return s;
}

void AmgHierarchy::vcycle(std::span<const double> b, std::span<double> x) const {
  const int n = levels_.empty() ? coarse_a_.n : levels_.front().a.n;
  if (b.size() != static_cast<std::size_t>(n) || x.size() != b.size()) throw InvalidArgument("AmgHierarchy::vcycle: size mismatch");
  cycle(0, b, x);
}

void AmgHierarchy::cycle(std::size_t level, std::span<const double> b, std::span<double> x) const {
  if (level == levels_.size()) {
    const auto nc = static_cast<std::size_t>(coarse_a_.n);
    for (std::size_t i = 0; i < nc; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < nc; ++j) s += coarse_pinv_[i * nc + j] * b[j];
      x[i] = s;
    }
    return;
  }
  const auto& lvl = levels_[level];
  const auto n = static_cast<std::size_t>(lvl.a.n);
  const auto nc = static_cast<std::size_t>(lvl.num_coarse);
  std::fill(x.begin(), x.end(), 0.0);
  jacobi_sweep(lvl.a, lvl.inv_diag, options_.jacobi_weight, b, x);
  std::vector<double> r(n), rc(nc, 0.0), xc(nc, 0.0);
  lvl.a.apply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  for (std::size_t i = 0; i < n; ++i)
    for (int q = lvl.p.row_ptr[i]; q < lvl.p.row_ptr[i + 1]; ++q)
      rc[static_cast<std::size_t>(lvl.p.col[static_cast<std::size_t>(q)])] += lvl.p.val[static_cast<std::size_t>(q)] * r[i];
  cycle(level + 1, rc, xc);
  for (std::size_t i = 0; i < n; ++i)
    for (int q = lvl.p.row_ptr[i]; q < lvl.p.row_ptr[i + 1]; ++q)
      x[i] += lvl.p.val[static_cast<std::size_t>(q)] * xc[static_cast<std::size_t>(lvl.p.col[static_cast<std::size_t>(q)])];
  jacobi_sweep(lvl.a, lvl.inv_diag, options_.jacobi_weight, b, x);
}

sim::CommPlan AmgHierarchy::comm_plan(std::span<const int> vertex_owner, int num_ranks) const {
  const int n0 = levels_.empty() ? coarse_a_.n : levels_.front().a.n;
  if (vertex_owner.size() != static_cast<std::size_t>(n0)) throw InvalidArgument("AmgHierarchy::comm_plan: owner size mismatch");
  sim::CommPlan plan;
  plan.flops.assign(static_cast<std::size_t>(num_ranks), 0.0);
  std::vector<int> owner(vertex_owner.begin(), vertex_owner.end());

  auto add_stage = [&](const std::map<std::pair<int, int>, std::set<int>>& traffic) {
    std::vector<sim::PlanMessage> stage;
    for (const auto& [pair, items] : traffic) stage.push_back({pair.first, pair.second, items.size()});
    if (!stage.empty()) plan.stages.push_back(std::move(stage));
  };

  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const auto& lvl = levels_[l];
    const auto& a = lvl.a;
    // Halo: owner(j) sends x_j to owner(i) for each coupling a_ij across ranks.
    std::map<std::pair<int, int>, std::set<int>> halo;
    for (int i = 0; i < a.n; ++i) {
      const int ri = owner[static_cast<std::size_t>(i)];
      plan.flops[static_cast<std::size_t>(ri)] +=
          3.0 * 2.0 * (a.row_ptr[static_cast<std::size_t>(i) + 1] - a.row_ptr[static_cast<std::size_t>(i)]) + 8.0;
      for (int k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
        const int j = a.col[static_cast<std::size_t>(k)];
        const int rj = owner[static_cast<std::size_t>(j)];
        if (rj != ri) halo[{rj, ri}].insert(j);
      }
    }
    std::vector<int> coarse_owner(static_cast<std::size_t>(lvl.num_coarse));
    for (int c = 0; c < lvl.num_coarse; ++c)
      coarse_owner[static_cast<std::size_t>(c)] = owner[static_cast<std::size_t>(seeds_[l][static_cast<std::size_t>(c)])];
    std::map<std::pair<int, int>, std::set<int>> transfer;
    for (int i = 0; i < a.n; ++i)
      for (int q = lvl.p.row_ptr[static_cast<std::size_t>(i)]; q < lvl.p.row_ptr[static_cast<std::size_t>(i) + 1]; ++q) {
        const int c = lvl.p.col[static_cast<std::size_t>(q)];
        const int ri = owner[static_cast<std::size_t>(i)], rc = coarse_owner[static_cast<std::size_t>(c)];
        if (ri != rc) transfer[{ri, rc}].insert(c);
      }
    std::map<std::pair<int, int>, std::set<int>> reverse;
    for (const auto& [pair, items] : transfer) reverse[{pair.second, pair.first}] = items;

    add_stage(halo);      // pre-smoothing residual evaluation
    add_stage(halo);      // residual
    add_stage(transfer);  // restriction
    add_stage(reverse);   // prolongation
    add_stage(halo);      // post-smoothing
    owner = std::move(coarse_owner);
  }
  const double nc = coarse_a_.n;
  plan.allreduce_words.push_back(static_cast<std::uint64_t>(coarse_a_.n));
  for (int r = 0; r < num_ranks; ++r) plan.flops[static_cast<std::size_t>(r)] += 2.0 * nc * nc / num_ranks;
  return plan;
}

} // namespace semscale::solvers
