#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "semscale/error.hpp"
#include "semscale/mesh/graph.hpp"
#include "semscale/mesh/hex_mesh.hpp"
#include "semscale/mesh/numbering.hpp"
#include "semscale/mesh/partition.hpp"

using namespace semscale;
using namespace semscale::mesh;

namespace {

ElementGraph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  ElementGraph g;
  g.adjacency.resize(static_cast<std::size_t>(n));
  for (auto [a, b] : edges) {
    g.adjacency[static_cast<std::size_t>(a)].push_back(b);
    g.adjacency[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
  return g;
}

// Cyclic Jacobi eigenvalues of a small symmetric matrix.
std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<std::vector<double>> laplacian(const ElementGraph& g) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    l[i][i] = static_cast<double>(g.adjacency[i].size());
    for (int j : g.adjacency[i]) l[i][static_cast<std::size_t>(j)] = -1.0;
  }
  return l;
}

void check_fiedler(const ElementGraph& g, const FiedlerOptions& opt = {}) {
  const auto r = fiedler_vector(g, opt);
  const auto ev = jacobi_eigenvalues(laplacian(g));
  CHECK(r.lambda2 == doctest::Approx(ev[1]).epsilon(1e-7));
  double norm = 0.0, sum = 0.0;
  for (double v : r.vector) {
    norm += v * v;
    sum += v;
  }
  CHECK(std::abs(norm - 1.0) < 1e-10);
  CHECK(std::abs(sum) < 1e-10);
}

} // namespace

TEST_CASE("box mesh counts") {
  const auto m = build_box_mesh(2, 2, 2);
  CHECK(m.num_elements() == 8);
  CHECK(m.num_vertices() == 27);
  const auto p = build_box_mesh(2, 2, 2, {1, 1, 1}, {true, true, true});
  CHECK(p.num_elements() == 8);
  CHECK(p.num_vertices() == 8);
  const auto one = build_box_mesh(1, 1, 1);
  CHECK(one.num_vertices() == 8);
  const auto r = build_box_mesh(3, 4, 5, {1.0, 2.0, 3.0});
  CHECK(r.num_vertices() == 4 * 5 * 6);
  for (const auto& el : r.elements)
    for (int v : el) CHECK((v >= 0 && v < r.num_vertices()));
  CHECK_THROWS_AS(build_box_mesh(0, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(build_box_mesh(1, 1, 1, {1.0, -1.0, 1.0}), InvalidArgument);

  std::ostringstream os;
  write_mesh(os, build_box_mesh(1, 1, 1));
  CHECK(os.str().rfind("mesh 1 1 1", 0) == 0);
}

TEST_CASE("element adjacency") {
  CHECK(element_adjacency(build_box_mesh(2, 1, 1)).num_edges() == 1);
  const auto m = build_box_mesh(3, 3, 3);
  const auto g = element_adjacency(m);
  CHECK(g.adjacency[static_cast<std::size_t>(m.element_index(1, 1, 1))].size() == 6);
  for (int v = 0; v < g.num_vertices(); ++v) {
    const auto& a = g.adjacency[static_cast<std::size_t>(v)];
    CHECK(a.size() >= 3);
    CHECK(a.size() <= 6);
    for (int nb : a) {
      CHECK(nb != v);
      const auto& back = g.adjacency[static_cast<std::size_t>(nb)];
      CHECK(std::binary_search(back.begin(), back.end(), v));
    }
  }
  const auto ring = element_adjacency(build_box_mesh(4, 1, 1, {1, 1, 1}, {true, false, false}));
  for (int v = 0; v < 4; ++v) {
    const auto& a = ring.adjacency[static_cast<std::size_t>(v)];
    REQUIRE(a.size() == 2);
    std::set<int> want{(v + 1) % 4, (v + 3) % 4};
    CHECK(std::set<int>(a.begin(), a.end()) == want);
  }
}

TEST_CASE("fiedler small graphs") {
  const auto path = graph_from_edges(3, {{0, 1}, {1, 2}});
  const auto r = fiedler_vector(path);
  CHECK(r.lambda2 == doctest::Approx(1.0));
  CHECK(r.vector[0] < r.vector[1]);
  CHECK(r.vector[1] < r.vector[2]);
  check_fiedler(path);

  const auto k4 = graph_from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  CHECK(fiedler_vector(k4).lambda2 == doctest::Approx(4.0));

  CHECK_THROWS_AS(fiedler_vector(graph_from_edges(4, {{0, 1}, {2, 3}})), NotConnectedError);
  CHECK_THROWS_AS(fiedler_vector(graph_from_edges(1, {})), InvalidArgument);
}

TEST_CASE("fiedler lanczos path agrees with dense oracle") {
  FiedlerOptions lanczos;
  lanczos.dense_threshold = 2;
  check_fiedler(element_adjacency(build_box_mesh(6, 3, 2)), lanczos);
  check_fiedler(element_adjacency(build_box_mesh(5, 4, 3, {1, 1, 1}, {true, false, false})), lanczos);
}

TEST_CASE("recursive spectral bisection") {
  const auto chain = build_box_mesh(4, 1, 1);
  const auto p1 = recursive_spectral_bisection(chain, 1);
  for (int r : p1.rank_of_element) CHECK(r == 0);

  const auto p2 = recursive_spectral_bisection(chain, 2);
  CHECK(p2.rank_of_element == std::vector<int>{0, 0, 1, 1});
  CHECK(edge_cut(element_adjacency(chain), p2) == 1);

  const auto m9 = build_box_mesh(3, 3, 1);
  auto loads = rank_loads(recursive_spectral_bisection(m9, 4));
  std::sort(loads.begin(), loads.end());
  CHECK(loads == std::vector<int>{2, 2, 2, 3});

  CHECK_THROWS_AS(recursive_spectral_bisection(chain, 5), TooManyRanksError);
  CHECK_THROWS_AS(recursive_spectral_bisection(chain, 0), InvalidArgument);
}

TEST_CASE("bisection balance, determinism and quality") {
  for (auto ext : {std::array<int, 3>{4, 4, 4}, std::array<int, 3>{5, 3, 2}, std::array<int, 3>{8, 4, 2}}) {
    const auto m = build_box_mesh(ext[0], ext[1], ext[2]);
    const auto g = element_adjacency(m);
    for (int p = 1; p <= std::min(m.num_elements(), 13); ++p) {
      const auto part = recursive_spectral_bisection(m, p);
      part.validate();
      const auto l = rank_loads(part);
      CHECK(*std::max_element(l.begin(), l.end()) - *std::min_element(l.begin(), l.end()) <= 1);
      CHECK(recursive_spectral_bisection(m, p).rank_of_element == part.rank_of_element);
    }
    if (m.num_elements() >= 64)
      for (int p : {2, 4, 8})
        CHECK(static_cast<double>(edge_cut(g, recursive_spectral_bisection(m, p))) <=
              1.5 * static_cast<double>(edge_cut(g, coordinate_bisection(m, p))));
  }
}

TEST_CASE("partition histogram") {
  CHECK(partition_histogram(block_partition(8, 8)) == std::map<int, int>{{1, 8}});
  CHECK(partition_histogram(block_partition(8, 3)) == std::map<int, int>{{2, 1}, {3, 2}});
  CHECK(partition_histogram(block_partition(1264032, 32768)) == std::map<int, int>{{38, 32768 - 18848}, {39, 18848}});
}

TEST_CASE("partition io round trip") {
  const auto part = recursive_spectral_bisection(build_box_mesh(3, 2, 2), 5);
  std::stringstream ss;
  write_partition(ss, part);
  const auto back = read_partition(ss);
  CHECK(back.num_ranks == 5);
  CHECK(back.rank_of_element == part.rank_of_element);
  std::istringstream bad("4 2\n0 0\n1 0\n");
  CHECK_THROWS_AS(read_partition(bad), IoError);
}

TEST_CASE("gll numbering") {
  const auto m = build_box_mesh(2, 2, 2);
  const auto num = build_numbering(m, 4);
  CHECK(num.num_global() == 7 * 7 * 7);
  const auto mult = num.multiplicity();
  CHECK(*std::max_element(mult.begin(), mult.end()) == 8);
  const auto c = num.point(num.num_global() - 1);
  CHECK(c[0] == doctest::Approx(1.0));

  const auto per = build_box_mesh(2, 2, 2, {1, 1, 1}, {true, true, true});
  const auto np = build_numbering(per, 4);
  CHECK(np.num_global() == 6 * 6 * 6);
  for (int v : np.multiplicity()) CHECK(v >= 1);
  CHECK(np.num_local() == 8u * 64u);
}
