#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "semscale/error.hpp"
#include "semscale/mesh/hex_mesh.hpp"
#include "semscale/mesh/numbering.hpp"
#include "semscale/mesh/partition.hpp"
#include "semscale/sem/basis.hpp"
#include "semscale/sim/cluster.hpp"
#include "semscale/time/flow.hpp"
#include "semscale/time/scheme.hpp"

using namespace semscale;
using namespace semscale::time;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Solves the Taylor order conditions sum_j c_j (-j)^m = rhs_m by Gaussian elimination.
std::vector<double> order_conditions(int first, int count, int target_m) {
  const auto n = static_cast<std::size_t>(count);
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t c = 0; c < n; ++c) a[m][c] = std::pow(-static_cast<double>(first + static_cast<int>(c)), static_cast<double>(m));
    a[m][n] = static_cast<int>(m) == target_m ? 1.0 : 0.0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
  return x;
}

struct Box {
  mesh::HexMesh mesh;
  mesh::GllNumbering num;
  sem::ReferenceBasis basis;
  Box(int e, int n)
      : mesh(mesh::build_box_mesh(e, e, e, {two_pi, two_pi, two_pi}, {true, true, true})),
        num(mesh::build_numbering(mesh, n)), basis(sem::make_reference_basis(n)) {}
};

double run_manufactured(const Box& box, int k, double dt, double t_end) {
  const double re = 1.0;
  const auto fc = make_flow_case("manufactured", re);
  sim::Exec exec(&box.num);
  SolverSettings settings;
  settings.pressure_tolerance = 1e-11;
  settings.velocity_tolerance = 1e-11;
  FlowSolver solver(box.mesh, box.num, box.basis, exec, TimeScheme::make(k, dt, re), settings, fc.forcing);
  auto st = solver.initial_state(fc.initial);
  const int steps = static_cast<int>(std::lround(t_end / dt));
  for (int i = 0; i < steps; ++i) solver.advance(st);
  return velocity_error(box.num, st.u.front(), fc.exact, st.t);
}

} // namespace

TEST_CASE("bdf and ext coefficients") {
  CHECK(bdf_coefficients(1) == std::vector<double>{1.0, -1.0});
  CHECK(ext_coefficients(1) == std::vector<double>{1.0});
  for (int k = 1; k <= 3; ++k) {
    const auto b = bdf_coefficients(k);
    const auto a = ext_coefficients(k);
    const auto b_oracle = order_conditions(0, k + 1, 1);
    const auto a_oracle = order_conditions(1, k, 0);
    REQUIRE(b.size() == b_oracle.size());
    REQUIRE(a.size() == a_oracle.size());
    for (std::size_t j = 0; j < b.size(); ++j) CHECK(b[j] == doctest::Approx(b_oracle[j]).epsilon(1e-12));
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == doctest::Approx(a_oracle[j]).epsilon(1e-12));
    double sb = 0.0, sa = 0.0;
    for (double v : b) sb += v;
    for (double v : a) sa += v;
    CHECK(std::abs(sb) < 1e-14);
    CHECK(std::abs(sa - 1.0) < 1e-14);
  }
  CHECK_THROWS_AS(bdf_coefficients(0), InvalidArgument);
  CHECK_THROWS_AS(ext_coefficients(4), InvalidArgument);
  CHECK_THROWS_AS(TimeScheme::make(2, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(TimeScheme::make(2, 0.1, -1.0), InvalidArgument);
  const auto s = TimeScheme::make(3, 0.1, 10.0);
  CHECK(s.ramped(1).k == 1);
  CHECK(s.ramped(2).k == 2);
  CHECK(s.ramped(7).k == 3);
}

TEST_CASE("advection term") {
  const auto m = mesh::build_box_mesh(1, 1, 1);
  const auto num = mesh::build_numbering(m, 6);
  const auto basis = sem::make_reference_basis(6);
  sim::Exec exec(&num);
  const auto n = static_cast<std::size_t>(num.num_global());
  auto field = [&](auto f) {
    Vec3Field u;
    for (auto& c : u) c.resize(n);
    for (int g = 0; g < num.num_global(); ++g) {
      const auto x = num.point(g);
      const auto v = f(x[0], x[1], x[2]);
      for (std::size_t c = 0; c < 3; ++c) u[c][static_cast<std::size_t>(g)] = v[c];
    }
    return u;
  };
  const auto constant = eval_advection(m, num, basis, field([](double, double, double) { return std::array<double, 3>{1, -2, 3}; }), exec);
  for (const auto& c : constant)
    for (double v : c) CHECK(std::abs(v) < 1e-12);
  const auto shear = eval_advection(m, num, basis, field([](double, double y, double) { return std::array<double, 3>{y, 0, 0}; }), exec);
  for (const auto& c : shear)
    for (double v : c) CHECK(std::abs(v) < 1e-12);
  const auto quad = eval_advection(m, num, basis, field([](double x, double, double) { return std::array<double, 3>{x * x, 0, 0}; }), exec);
  for (int g = 0; g < num.num_global(); ++g) {
    const double x = num.point(g)[0];
    CHECK(std::abs(quad[0][static_cast<std::size_t>(g)] - 2 * x * x * x) < 1e-10);
    CHECK(std::abs(quad[1][static_cast<std::size_t>(g)]) < 1e-12);
  }

  // Shared points across elements get the average of both one-sided derivatives.
  const auto m2 = mesh::build_box_mesh(3, 2, 2, {1.0, 1.0, 1.0});
  const auto num2 = mesh::build_numbering(m2, 5);
  const auto b5 = sem::make_reference_basis(5);
  sim::Exec e2(&num2);
  Vec3Field u;
  for (auto& c : u) c.assign(static_cast<std::size_t>(num2.num_global()), 0.0);
  for (int g = 0; g < num2.num_global(); ++g) {
    const auto x = num2.point(g);
    u[0][static_cast<std::size_t>(g)] = x[1] * x[1];
    u[1][static_cast<std::size_t>(g)] = x[0];
  }
  const auto nn = eval_advection(m2, num2, b5, u, e2);
  for (int g = 0; g < num2.num_global(); ++g) {
    const auto x = num2.point(g);
    CHECK(std::abs(nn[0][static_cast<std::size_t>(g)] - x[0] * 2 * x[1]) < 1e-10);
    CHECK(std::abs(nn[1][static_cast<std::size_t>(g)] - x[1] * x[1]) < 1e-10);
  }
}

TEST_CASE("zero state stays zero") {
  const Box box(2, 4);
  sim::Exec exec(&box.num);
  FlowSolver solver(box.mesh, box.num, box.basis, exec, TimeScheme::make(2, 0.1, 10.0));
  auto st = solver.initial_state({});
  for (int i = 0; i < 3; ++i) {
    const auto rep = solver.advance(st);
    CHECK(rep.pressure_iterations == 0);
    CHECK(rep.velocity_iterations == 0);
  }
  for (const auto& c : st.u.front())
    for (double v : c) CHECK(v == 0.0);
  CHECK(st.u.size() == 2);
  CHECK(solver.pressure_space().size() == 0);
}

TEST_CASE("manufactured solution converges at the scheme order") {
  const Box box(3, 9);
  for (int k : {1, 2}) {
    const double e1 = run_manufactured(box, k, 0.1, 1.0);
    const double e2 = run_manufactured(box, k, 0.05, 1.0);
    const double e4 = run_manufactured(box, k, 0.025, 1.0);
    // Least-squares slope of log(err) against log(dt).
    const double lx[3] = {std::log(0.1), std::log(0.05), std::log(0.025)};
    const double ly[3] = {std::log(e1), std::log(e2), std::log(e4)};
    const double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < 3; ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    MESSAGE("k=" << k << " errors " << e1 << " " << e2 << " " << e4 << " slope " << slope);
    CHECK(std::abs(slope - k) <= 0.25);
  }
}

TEST_CASE("pressure correction leaves a divergence-free field") {
  const Box box(2, 6);
  const auto fc = make_flow_case("taylor_green", 10.0);
  sim::Exec exec(&box.num);
  SolverSettings settings;
  settings.pressure_tolerance = 1e-8;
  FlowSolver solver(box.mesh, box.num, box.basis, exec, TimeScheme::make(2, 0.05, 10.0), settings);
  auto st = solver.initial_state(fc.initial);
  for (int i = 0; i < 4; ++i) {
    const auto rep = solver.advance(st);
    CHECK(rep.pressure_iterations > 0);
    CHECK(rep.divergence <= 10 * settings.pressure_tolerance);
  }
  CHECK(solver.pressure_space().size() == 4);
  CHECK(solver.velocity_space(0).size() > 0);
}

TEST_CASE("solver dispatch follows the field kind") {
  const Box box(2, 5);
  const auto nranks = 4;
  sim::Cluster cluster(box.num, {4e-6, 5e-9, 1.1e-9, {}});
  const int idx = cluster.attach(mesh::recursive_spectral_bisection(box.mesh, nranks));
  FlowSolver solver(box.mesh, box.num, box.basis, cluster, TimeScheme::make(1, 1e-4, 1.0));
  const auto n = static_cast<std::size_t>(box.num.num_global());
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = std::sin(0.37 * static_cast<double>(i));
  const auto v = solver.helmholtz_dispatch(FieldKind::VelocityComponent, rhs);
  CHECK(v.path == "cg");
  CHECK(v.iterations <= 10);
  CHECK(v.relative_residual <= 1e-8);
  CHECK(cluster.ranks(idx).log.site("cg").collectives > 0);
  CHECK(cluster.ranks(idx).log.site("gmres").collectives == 0);

  auto prhs = rhs;
  double mean = 0.0;
  for (double x : prhs) mean += x;
  for (double& x : prhs) x -= mean / static_cast<double>(n);
  const auto p = solver.helmholtz_dispatch(FieldKind::Pressure, prhs);
  CHECK(p.path == "gmres");
  CHECK(cluster.ranks(idx).log.site("gmres").collectives > 0);
  CHECK(cluster.ranks(idx).log.site("schwarz").msgs > 0);

  CHECK(parse_field_kind("pressure") == FieldKind::Pressure);
  CHECK_THROWS_AS(parse_field_kind("temperature"), InvalidArgument);
}

TEST_CASE("runs are reproducible and L = 0 disables projection") {
  const Box box(2, 5);
  const auto fc = make_flow_case("taylor_green", 5.0);
  auto run = [&](int l) {
    sim::Cluster cluster(box.num, {4e-6, 5e-9, 1.1e-9, {}});
    cluster.attach(mesh::recursive_spectral_bisection(box.mesh, 4), 7);
    SolverSettings settings;
    settings.projection = l;
    FlowSolver solver(box.mesh, box.num, box.basis, cluster, TimeScheme::make(2, 0.05, 5.0), settings);
    auto st = solver.initial_state(fc.initial);
    std::vector<StepReport> reps;
    for (int i = 0; i < 5; ++i) reps.push_back(solver.advance(st));
    CHECK(solver.pressure_space().size() == std::min(l, 5));
    return std::make_pair(reps, cluster.ranks(0).timing());
  };
  const auto [r1, t1] = run(3);
  const auto [r2, t2] = run(3);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].pressure_iterations == r2[i].pressure_iterations);
    CHECK(r1[i].velocity_iterations == r2[i].velocity_iterations);
  }
  CHECK(t1.t_a == t2.t_a);
  CHECK(t1.t_c == t2.t_c);
  (void)run(0);

  std::ostringstream os;
  write_step_csv(os, r1);
  CHECK(os.str().rfind("step,t,pressure_iterations,velocity_iterations,wall_seconds,model_seconds,divergence\n1,", 0) == 0);
  CHECK_THROWS_AS(make_flow_case("pipe", 1.0), InvalidArgument);
}
