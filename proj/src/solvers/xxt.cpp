#include "semscale/solvers/xxt.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "semscale/error.hpp"

namespace semscale::solvers {

namespace {

void dissect(const CsrMatrix& a, std::span<const std::array<double, 3>> coords, std::vector<int> verts,
             std::vector<char>& in_left, std::vector<int>& order) {
  if (verts.size() <= 4) {
    std::sort(verts.begin(), verts.end());
    order.insert(order.end(), verts.begin(), verts.end());
    return;
  }
  std::vector<double> key(verts.size());
  if (!coords.empty()) {
    std::array<double, 3> lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (int v : verts)
      for (std::size_t d = 0; d < 3; ++d) {
        lo[d] = std::min(lo[d], coords[static_cast<std::size_t>(v)][d]);
        hi[d] = std::max(hi[d], coords[static_cast<std::size_t>(v)][d]);
      }
    std::size_t axis = 0;
    for (std::size_t d = 1; d < 3; ++d)
      if (hi[d] - lo[d] > hi[axis] - lo[axis]) axis = d;
    for (std::size_t i = 0; i < verts.size(); ++i) key[i] = coords[static_cast<std::size_t>(verts[i])][axis];
  } else {
    for (std::size_t i = 0; i < verts.size(); ++i) key[i] = verts[i];
  }
  std::vector<std::size_t> idx(verts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    return key[x] != key[y] ? key[x] < key[y] : verts[x] < verts[y];
  });
  // Keep equal keys together so separators follow coordinate planes.
  std::size_t cut = idx.size() / 2;
  while (cut < idx.size() && cut > 0 && key[idx[cut]] == key[idx[cut - 1]]) ++cut;
  if (cut == idx.size()) cut = idx.size() / 2;

  std::vector<int> left, right, sep;
  for (std::size_t i = 0; i < cut; ++i) left.push_back(verts[idx[i]]);
  for (int v : left) in_left[static_cast<std::size_t>(v)] = 1;
  for (std::size_t i = cut; i < idx.size(); ++i) {
    const int v = verts[idx[i]];
    bool touches = false;
    for (int k = a.row_ptr[static_cast<std::size_t>(v)]; k < a.row_ptr[static_cast<std::size_t>(v) + 1] && !touches; ++k)
      touches = in_left[static_cast<std::size_t>(a.col[static_cast<std::size_t>(k)])] != 0;
    (touches ? sep : right).push_back(v);
  }
  for (int v : left) in_left[static_cast<std::size_t>(v)] = 0;
  if (left.empty() || (right.empty() && sep.size() == verts.size())) {
    std::sort(verts.begin(), verts.end());
    order.insert(order.end(), verts.begin(), verts.end());
    return;
  }
  dissect(a, coords, std::move(left), in_left, order);
  if (!right.empty()) dissect(a, coords, std::move(right), in_left, order);
  std::sort(sep.begin(), sep.end());
  order.insert(order.end(), sep.begin(), sep.end());
}

} // namespace

std::vector<int> nested_dissection(const CsrMatrix& a, std::span<const std::array<double, 3>> coords) {
  if (!coords.empty() && coords.size() != static_cast<std::size_t>(a.n))
    throw InvalidArgument("nested_dissection: coordinate count mismatch");
  std::vector<int> all(static_cast<std::size_t>(a.n));
  std::iota(all.begin(), all.end(), 0);
  std::vector<char> in_left(static_cast<std::size_t>(a.n), 0);
  std::vector<int> order;
  order.reserve(all.size());
  dissect(a, coords, std::move(all), in_left, order);
  return order;
}

XxtSolver::XxtSolver(const CsrMatrix& a, std::span<const std::array<double, 3>> coords) : n_(a.n) {
  if (n_ < 1) throw InvalidArgument("XxtSolver: empty matrix");
  double amax = 0.0, worst_row = 0.0;
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      s += a.val[static_cast<std::size_t>(k)];
      amax = std::max(amax, std::abs(a.val[static_cast<std::size_t>(k)]));
    }
    worst_row = std::max(worst_row, std::abs(s));
  }
  singular_ = n_ > 1 && worst_row <= 1e-12 * amax;
  if (n_ == 1 && amax == 0.0) singular_ = true;

  perm_ = nested_dissection(a, coords);
  std::vector<int> inv(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) inv[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])] = i;
  m_ = singular_ ? n_ - 1 : n_;

  parent_.assign(static_cast<std::size_t>(n_), -1);
  rows_.assign(static_cast<std::size_t>(m_), {});
  vals_.assign(static_cast<std::size_t>(m_), {});
  if (m_ == 0) return;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(a.nnz());
  for (int i = 0; i < n_; ++i)
    for (int k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const int pi = inv[static_cast<std::size_t>(i)];
      const int pj = inv[static_cast<std::size_t>(a.col[static_cast<std::size_t>(k)])];
      if (pi < m_ && pj < m_) trip.emplace_back(pi, pj, a.val[static_cast<std::size_t>(k)]);
    }
  Eigen::SparseMatrix<double> sm(m_, m_);
  sm.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::NaturalOrdering<int>> llt(sm);
  if (llt.info() != Eigen::Success) throw FactorizationError("XxtSolver: matrix is not positive definite");
  const Eigen::SparseMatrix<double> l = llt.matrixL();
  for (int j = 0; j < m_; ++j) {
    if (!(l.coeff(j, j) > 0.0) || !std::isfinite(l.coeff(j, j))) throw FactorizationError("XxtSolver: non-positive pivot");
    for (Eigen::SparseMatrix<double>::InnerIterator it(l, j); it; ++it)
      if (it.row() > j) {
        parent_[static_cast<std::size_t>(j)] = static_cast<int>(it.row());
        break;
      }
  }

  // Column j of L^{-T} solves L^T x = e_j; it is supported on the subtree of j.
  std::vector<char> in_sub(static_cast<std::size_t>(m_), 0);
  std::vector<double> x(static_cast<std::size_t>(m_), 0.0);
  for (int j = 0; j < m_; ++j) {
    in_sub[static_cast<std::size_t>(j)] = 1;
    std::vector<int> sub{j};
    for (int i = j - 1; i >= 0; --i) {
      const int p = parent_[static_cast<std::size_t>(i)];
      if (p >= 0 && p <= j && in_sub[static_cast<std::size_t>(p)]) {
        in_sub[static_cast<std::size_t>(i)] = 1;
        sub.push_back(i);
      }
    }
    // sub is in descending order
    for (int i : sub) {
      double s = i == j ? 1.0 : 0.0;
      double diag = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(l, i); it; ++it) {
        const auto r = static_cast<int>(it.row());
        if (r == i) {
          diag = it.value();
        } else if (r <= j) {
          s -= it.value() * x[static_cast<std::size_t>(r)];
        }
      }
      x[static_cast<std::size_t>(i)] = s / diag;
    }
    auto& rows = rows_[static_cast<std::size_t>(j)];
    auto& vals = vals_[static_cast<std::size_t>(j)];
    for (auto it = sub.rbegin(); it != sub.rend(); ++it) {
      rows.push_back(*it);
      vals.push_back(x[static_cast<std::size_t>(*it)]);
    }
    for (int i : sub) {
      x[static_cast<std::size_t>(i)] = 0.0;
      in_sub[static_cast<std::size_t>(i)] = 0;
    }
  }
}

std::size_t XxtSolver::nnz() const {
  std::size_t s = 0;
  for (const auto& r : rows_) s += r.size();
  return s;
}

void XxtSolver::solve(std::span<const double> b, std::span<double> x) const {
  if (b.size() != static_cast<std::size_t>(n_) || x.size() != static_cast<std::size_t>(n_))
    throw InvalidArgument("XxtSolver::solve: size mismatch");
  std::vector<double> bp(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) bp[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])];
  if (singular_) {
    const double mean = std::accumulate(bp.begin(), bp.end(), 0.0) / n_;
    for (double& v : bp) v -= mean;
  }
  std::vector<double> xp(static_cast<std::size_t>(n_), 0.0);
  for (int j = 0; j < m_; ++j) {
    const auto& rows = rows_[static_cast<std::size_t>(j)];
    const auto& vals = vals_[static_cast<std::size_t>(j)];
    double y = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) y += vals[k] * bp[static_cast<std::size_t>(rows[k])];
    for (std::size_t k = 0; k < rows.size(); ++k) xp[static_cast<std::size_t>(rows[k])] += vals[k] * y;
  }
  if (singular_) {
    const double mean = std::accumulate(xp.begin(), xp.end(), 0.0) / n_;
    for (double& v : xp) v -= mean;
  }
  for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])] = xp[static_cast<std::size_t>(i)];
}

sim::CommPlan XxtSolver::comm_plan(std::span<const int> vertex_owner, int num_ranks) const {
  if (vertex_owner.size() != static_cast<std::size_t>(n_)) throw InvalidArgument("XxtSolver::comm_plan: owner size mismatch");
  sim::CommPlan plan;
  const auto np = static_cast<std::size_t>(num_ranks);
  plan.flops.assign(np, 0.0);
  std::vector<std::vector<int>> owners(static_cast<std::size_t>(m_));
  for (int j = 0; j < m_; ++j) {
    auto& o = owners[static_cast<std::size_t>(j)];
    for (int r : rows_[static_cast<std::size_t>(j)]) {
      const int rank = vertex_owner[static_cast<std::size_t>(perm_[static_cast<std::size_t>(r)])];
      o.push_back(rank);
      plan.flops[static_cast<std::size_t>(rank)] += 4.0;
    }
    std::sort(o.begin(), o.end());
    o.erase(std::unique(o.begin(), o.end()), o.end());
  }
  for (int s = 0; (1 << s) < num_ranks; ++s) {
    std::vector<std::uint64_t> words(np, 0);
    for (const auto& o : owners) {
      if (o.size() < 2) continue;
      std::vector<int> blocks;
      for (int r : o) blocks.push_back(r >> s);
      blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
      for (int b : blocks) {
        if (!std::binary_search(blocks.begin(), blocks.end(), b ^ 1)) continue;
        // Every rank of block b trades this column's partial sum with its partner.
        for (int r = b << s; r < std::min((b + 1) << s, num_ranks); ++r)
          if ((r ^ (1 << s)) < num_ranks) ++words[static_cast<std::size_t>(r)];
      }
    }
    std::vector<sim::PlanMessage> stage;
    for (int r = 0; r < num_ranks; ++r)
      if (words[static_cast<std::size_t>(r)] > 0) stage.push_back({r, r ^ (1 << s), words[static_cast<std::size_t>(r)]});
    if (!stage.empty()) plan.stages.push_back(std::move(stage));
  }
  return plan;
}

} // namespace semscale::solvers
