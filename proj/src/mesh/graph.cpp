#include "semscale/mesh/graph.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>

#include "semscale/error.hpp"

namespace semscale::mesh {

std::size_t ElementGraph::num_edges() const {
  std::size_t twice = 0;
  for (const auto& a : adjacency) twice += a.size();
  return twice / 2;
}

ElementGraph ElementGraph::induced(std::span<const int> vertices) const {
  std::vector<int> local(adjacency.size(), -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) local[static_cast<std::size_t>(vertices[i])] = static_cast<int>(i);
  ElementGraph sub;
  sub.adjacency.resize(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (int nb : adjacency[static_cast<std::size_t>(vertices[i])]) {
      const int l = local[static_cast<std::size_t>(nb)];
      if (l >= 0) sub.adjacency[i].push_back(l);
    }
    std::sort(sub.adjacency[i].begin(), sub.adjacency[i].end());
  }
  return sub;
}

std::vector<int> ElementGraph::components(int* count) const {
  const std::size_t n = adjacency.size();
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    std::queue<int> q;
    q.push(static_cast<int>(s));
    label[s] = next;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int nb : adjacency[static_cast<std::size_t>(v)]) {
        if (label[static_cast<std::size_t>(nb)] < 0) {
          label[static_cast<std::size_t>(nb)] = next;
          q.push(nb);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

ElementGraph element_adjacency(const HexMesh& mesh) {
  std::map<std::array<int, 4>, std::vector<int>> faces;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    for (int d = 0; d < 3; ++d)
      for (int side = 0; side < 2; ++side) {
        std::array<int, 4> key{};
        std::size_t idx = 0;
        for (int c = 0; c < 8; ++c)
          if (((c >> d) & 1) == side) key[idx++] = el[static_cast<std::size_t>(c)];
        std::sort(key.begin(), key.end());
        faces[key].push_back(e);
      }
  }
  ElementGraph g;
  g.adjacency.resize(static_cast<std::size_t>(mesh.num_elements()));
  for (const auto& [key, owners] : faces) {
    for (std::size_t a = 0; a < owners.size(); ++a)
      for (std::size_t b = a + 1; b < owners.size(); ++b) {
        if (owners[a] == owners[b]) continue;
        g.adjacency[static_cast<std::size_t>(owners[a])].push_back(owners[b]);
        g.adjacency[static_cast<std::size_t>(owners[b])].push_back(owners[a]);
      }
  }
  for (auto& a : g.adjacency) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return g;
}

namespace {

using Vec = Eigen::VectorXd;

void laplacian_apply(const ElementGraph& g, const Vec& x, Vec& y) {
  const auto n = static_cast<Eigen::Index>(g.adjacency.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& nbrs = g.adjacency[static_cast<std::size_t>(i)];
    double s = static_cast<double>(nbrs.size()) * x[i];
    for (int j : nbrs) s -= x[j];
    y[i] = s;
  }
}

/// Index ramp plus a small deterministic perturbation so every eigencomponent is present.
Vec start_vector(Eigen::Index n) {
  Vec v(n);
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  for (Eigen::Index i = 0; i < n; ++i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    const double jitter = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
    v[i] = static_cast<double>(i) + 1e-3 * static_cast<double>(n) * jitter;
  }
  v.array() -= v.mean();
  return v.normalized();
}

void orient(Vec& v) {
  v.array() -= v.mean();
  v.normalize();
  const auto n = v.size();
  double corr = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) corr += v[i] * (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1));
  if (corr < 0.0) v = -v;
}

FiedlerResult dense_fiedler(const ElementGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.adjacency.size());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j : g.adjacency[static_cast<std::size_t>(i)]) lap(i, j) = -1.0;
    lap(i, i) = static_cast<double>(g.adjacency[static_cast<std::size_t>(i)].size());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  const Vec evals = es.eigenvalues();
  const double lambda2 = evals[1];
  const Vec start = start_vector(n);
  Vec proj = Vec::Zero(n);
  for (Eigen::Index k = 1; k < n; ++k) {
    if (std::abs(evals[k] - lambda2) > 1e-8 * std::max(1.0, lambda2)) break;
    const auto col = es.eigenvectors().col(k);
    proj += col.dot(start) * col;
  }
  if (proj.norm() < 1e-8) proj = es.eigenvectors().col(1);
  orient(proj);

  FiedlerResult r;
  r.vector.assign(proj.data(), proj.data() + n);
  r.lambda2 = lambda2;
  r.iterations = 0;
  r.converged = true;
  return r;
}

FiedlerResult lanczos_fiedler(const ElementGraph& g, const FiedlerOptions& opt) {
  const auto n = static_cast<Eigen::Index>(g.adjacency.size());
  const Eigen::Index max_dim = std::min<Eigen::Index>(n - 1, opt.max_iterations);

  Eigen::MatrixXd basis(n, max_dim + 1);
  std::vector<double> alpha, beta;
  basis.col(0) = start_vector(n);
  Vec w(n);

  double theta = 0.0;
  Vec ritz_coeffs;
  bool converged = false;
  Eigen::Index k = 0;
  for (; k < max_dim; ++k) {
    laplacian_apply(g, basis.col(k), w);
    w.array() -= w.mean();
    const double a = basis.col(k).dot(w);
    alpha.push_back(a);
    w -= a * basis.col(k);
    if (k > 0) w -= beta.back() * basis.col(k - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const Vec h = basis.leftCols(k + 1).transpose() * w;
      w -= basis.leftCols(k + 1) * h;
    }
    w.array() -= w.mean();
    const double b = w.norm();

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Vec diag = Eigen::Map<Vec>(alpha.data(), m);
    Vec sub = Eigen::Map<Vec>(beta.data(), m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    theta = tri.eigenvalues()[0];
    ritz_coeffs = tri.eigenvectors().col(0);
    const double residual = b * std::abs(ritz_coeffs[m - 1]);
    if (residual <= opt.tolerance || b < 1e-13) {
      converged = true;
      ++k;
      break;
    }
    beta.push_back(b);
    basis.col(k + 1) = w / b;
  }

  const auto m = static_cast<Eigen::Index>(alpha.size());
  Vec y = basis.leftCols(m) * ritz_coeffs;
  orient(y);
  Vec ly(n);
  laplacian_apply(g, y, ly);
  theta = y.dot(ly);

  FiedlerResult r;
  r.vector.assign(y.data(), y.data() + n);
  r.lambda2 = theta;
  r.iterations = static_cast<int>(k);
  r.converged = converged || (ly - theta * y).norm() <= opt.tolerance;
  return r;
}

} // namespace

FiedlerResult fiedler_vector(const ElementGraph& graph, const FiedlerOptions& options) {
  if (graph.num_vertices() < 2) throw InvalidArgument("fiedler_vector: need at least two vertices");
  int ncomp = 0;
  (void)graph.components(&ncomp);
  if (ncomp > 1) throw NotConnectedError("fiedler_vector: graph is disconnected (lambda_2 = 0)");
  if (graph.num_vertices() < options.dense_threshold) return dense_fiedler(graph);
  return lanczos_fiedler(graph, options);
}

} // namespace semscale::mesh
