// One line per acceptance criterion; exit status 1 if any gated criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "semscale/mesh/hex_mesh.hpp"
#include "semscale/mesh/numbering.hpp"
#include "semscale/mesh/partition.hpp"
#include "semscale/perf/pingpong.hpp"
#include "semscale/perf/profile.hpp"
#include "semscale/perf/scaling.hpp"
#include "semscale/report/experiment.hpp"
#include "semscale/sem/basis.hpp"
#include "semscale/sem/helmholtz.hpp"
#include "semscale/sim/cluster.hpp"
#include "semscale/sim/comm_model.hpp"
#include "semscale/solvers/amg.hpp"
#include "semscale/solvers/coarse.hpp"
#include "semscale/solvers/krylov.hpp"
#include "semscale/solvers/schwarz.hpp"
#include "semscale/solvers/sem_operator.hpp"
#include "semscale/solvers/xxt.hpp"
#include "semscale/time/flow.hpp"

using namespace semscale;

namespace {

using Clock = std::chrono::steady_clock;
constexpr double pi = std::numbers::pi;

int failures = 0;

void verdict(int id, bool pass, const std::string& detail, bool gated = true) {
  const char* tag = pass ? "PASS" : (gated ? "FAIL" : "MISS");
  std::printf("criterion %2d: %s  %s%s\n", id, tag, detail.c_str(), gated ? "" : " [reported, not gated]");
  std::fflush(stdout);
  if (gated && !pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// ---------------------------------------------------------------- 1
void criterion_model_fit() {
  const auto t0 = Clock::now();
  perf::PingPongOptions o;
  o.model = perf::builtin_profile("mira").comm_model();
  o.noise = 0.02;
  o.reps = 50;
  o.seed = 2024;
  for (int k = 0; k < 20; ++k) o.sizes.push_back(std::uint64_t{1} << k);
  const auto fit = perf::fit_alpha_beta(perf::pingpong_run(o));
  const double ea = rel(fit.alpha_star, o.model.alpha_star), eb = rel(fit.beta_star, o.model.beta_star);
  const double secs = seconds_since(t0);
  verdict(1, ea <= 0.05 && eb <= 0.05 && secs < 1.0,
          fmt("alpha*=%.4g us (err %.2f%%), beta*=%.4g us/word (err %.2f%%), tol 5%%, %.2f s", fit.alpha_star * 1e6,
              100 * ea, fit.beta_star * 1e6, 100 * eb, secs));
}

// ---------------------------------------------------------------- 2
void criterion_nondimensional() {
  const double am = sim::nondimensionalize(perf::builtin_profile("mira").comm_model()).alpha;
  const double at = sim::nondimensionalize(perf::builtin_profile("titan").comm_model()).alpha;
  const double ab = sim::nondimensionalize(perf::builtin_profile("beskow").comm_model()).alpha;
  const bool close = rel(am, 3600) <= 0.05 && rel(at, 3500) <= 0.05 && rel(ab, 17000) <= 0.05;
  const bool order = ab > am && am > at;
  verdict(2, close && order,
          fmt("alpha mira=%.1f titan=%.1f beskow=%.1f vs 3600/3500/17000 (tol 5%%), ordering %s", am, at, ab,
              order ? "holds" : "violated"));
}

// ---------------------------------------------------------------- 3
void criterion_gridpoints() {
  const auto a = perf::gridpoints(36480, 8), b = perf::gridpoints(1264032, 12);
  verdict(3, a == 18677760ull && b == 2184247296ull,
          fmt("gridpoints(36480,8)=%llu gridpoints(1264032,12)=%llu", static_cast<unsigned long long>(a),
              static_cast<unsigned long long>(b)));
}

// ---------------------------------------------------------------- 4
double lagrange_derivative(const std::vector<double>& x, int j, double at) {
  const int n = static_cast<int>(x.size());
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    if (k == j) continue;
    double term = 1.0 / (x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(k)]);
    for (int m = 0; m < n; ++m)
      if (m != j && m != k) term *= (at - x[static_cast<std::size_t>(m)]) / (x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(m)]);
    total += term;
  }
  return total;
}

// Element matrix h1 A + h2 B summed quadrature point by quadrature point.
std::vector<double> dense_element(int n, double hx, double hy, double hz, double h1, double h2) {
  const auto [x, w] = sem::gll_nodes_weights(n);
  const auto un = static_cast<std::size_t>(n);
  std::vector<double> d(un * un);
  for (std::size_t q = 0; q < un; ++q)
    for (std::size_t j = 0; j < un; ++j) d[q * un + j] = lagrange_derivative(x, static_cast<int>(j), x[q]);
  const std::size_t m = un * un * un;
  std::vector<double> h(m * m, 0.0);
  const double jac = hx * hy * hz / 8.0;
  const double s[3] = {2.0 / hx, 2.0 / hy, 2.0 / hz};
  // Basis functions are cardinal at the quadrature points, so the derivative
  // of phi_(a,b,c) at q is nonzero only when q agrees off the derivative axis.
  for (std::size_t qc = 0; qc < un; ++qc)
    for (std::size_t qb = 0; qb < un; ++qb)
      for (std::size_t qa = 0; qa < un; ++qa) {
        const std::size_t q[3] = {qa, qb, qc};
        const double wq = w[qa] * w[qb] * w[qc] * jac;
        const std::size_t iq = qa + un * (qb + un * qc);
        h[iq * m + iq] += h2 * wq;
        for (int dim = 0; dim < 3; ++dim)
          for (std::size_t i = 0; i < un; ++i)
            for (std::size_t j = 0; j < un; ++j) {
              std::size_t a[3] = {q[0], q[1], q[2]}, b[3] = {q[0], q[1], q[2]};
              a[dim] = i;
              b[dim] = j;
              const std::size_t ia = a[0] + un * (a[1] + un * a[2]), ib = b[0] + un * (b[1] + un * b[2]);
              h[ia * m + ib] += h1 * wq * s[dim] * s[dim] * d[q[dim] * un + i] * d[q[dim] * un + j];
            }
      }
  return h;
}

void criterion_solver_correctness() {
  const auto t0 = Clock::now();
  // Poisson -lap u = 3 pi^2 u on [0,1]^3, u = sin(pi x) sin(pi y) sin(pi z), u = 0 on the boundary.
  const int n = 12;
  const auto b = sem::make_reference_basis(n);
  const sem::ElementGeometry g(1.0, 1.0, 1.0);
  sem::HelmholtzKernel kernel(b);
  const std::size_t m = b.points_per_element();
  auto pos = [&](int a) { return 0.5 * (1.0 + b.nodes[static_cast<std::size_t>(a)]); };
  std::vector<double> f(m), mask(m), exact(m);
  for (int c = 0; c < n; ++c)
    for (int bb = 0; bb < n; ++bb)
      for (int a = 0; a < n; ++a) {
        const auto i = static_cast<std::size_t>(a + n * (bb + n * c));
        exact[i] = std::sin(pi * pos(a)) * std::sin(pi * pos(bb)) * std::sin(pi * pos(c));
        f[i] = 3 * pi * pi * exact[i];
        const bool edge = a == 0 || a == n - 1 || bb == 0 || bb == n - 1 || c == 0 || c == n - 1;
        mask[i] = edge ? 0.0 : 1.0;
      }
  std::vector<double> rhs(m);
  kernel.apply({0.0, 1.0}, g, f, rhs);
  for (std::size_t i = 0; i < m; ++i) rhs[i] *= mask[i];
  std::vector<double> diag(m);
  kernel.diagonal({1.0, 0.0}, g, diag);
  for (std::size_t i = 0; i < m; ++i)
    if (mask[i] == 0.0) diag[i] = 1.0;
  std::vector<double> tmp(m);
  const solvers::LinearMap op = [&](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < m; ++i) tmp[i] = x[i] * mask[i];
    kernel.apply({1.0, 0.0}, g, tmp, y);
    for (std::size_t i = 0; i < m; ++i) y[i] = mask[i] * y[i] + (1.0 - mask[i]) * x[i];
  };
  solvers::KrylovConfig cfg;
  cfg.tolerance = 1e-14;
  cfg.max_iterations = 2000;
  const auto sol = solvers::cg_solve(op, rhs, diag, cfg);

  // L2 error on a 24-point rule, interpolating the discrete solution.
  const auto [xq, wq] = sem::gll_nodes_weights(24);
  const auto interp = sem::interpolation_matrix(b.nodes, xq);
  const std::size_t nq = xq.size(), un = static_cast<std::size_t>(n);
  std::vector<double> s1(nq * un * un), s2(nq * nq * un), s3(nq * nq * nq, 0.0);
  for (std::size_t c = 0; c < un; ++c)
    for (std::size_t bb = 0; bb < un; ++bb)
      for (std::size_t qa = 0; qa < nq; ++qa) {
        double s = 0.0;
        for (std::size_t a = 0; a < un; ++a) s += interp[qa * un + a] * sol.x[a + un * (bb + un * c)];
        s1[qa + nq * (bb + un * c)] = s;
      }
  for (std::size_t c = 0; c < un; ++c)
    for (std::size_t qb = 0; qb < nq; ++qb)
      for (std::size_t qa = 0; qa < nq; ++qa) {
        double s = 0.0;
        for (std::size_t bb = 0; bb < un; ++bb) s += interp[qb * un + bb] * s1[qa + nq * (bb + un * c)];
        s2[qa + nq * (qb + nq * c)] = s;
      }
  double err2 = 0.0;
  for (std::size_t qc = 0; qc < nq; ++qc)
    for (std::size_t qb = 0; qb < nq; ++qb)
      for (std::size_t qa = 0; qa < nq; ++qa) {
        double s = 0.0;
        for (std::size_t c = 0; c < un; ++c) s += interp[qc * un + c] * s2[qa + nq * (qb + nq * c)];
        const double ex = std::sin(pi * 0.5 * (1 + xq[qa])) * std::sin(pi * 0.5 * (1 + xq[qb])) * std::sin(pi * 0.5 * (1 + xq[qc]));
        err2 += wq[qa] * wq[qb] * wq[qc] / 8.0 * (s - ex) * (s - ex);
      }
  const double l2 = std::sqrt(err2);

  // Element operator against the quadrature-sum matrix, then the assembled
  // operator on a small mesh against the assembled dense matrix.
  double worst = 0.0;
  for (int nn : {4, 6, 8}) {
    const auto bn = sem::make_reference_basis(nn);
    const double hx = 0.7, hy = 1.3, hz = 0.4, h1 = 0.8, h2 = 2.5;
    const auto dense = dense_element(nn, hx, hy, hz, h1, h2);
    const auto u = random_vector(bn.points_per_element(), 5u + static_cast<unsigned>(nn));
    const auto hu = sem::apply_helmholtz_local({h1, h2}, sem::ElementGeometry(hx, hy, hz), bn, u);
    const std::size_t mm = u.size();
    double scale = 0.0;
    for (std::size_t i = 0; i < mm; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < mm; ++j) s += dense[i * mm + j] * u[j];
      worst = std::max(worst, std::abs(hu[i] - s));
      scale = std::max(scale, std::abs(s));
    }
  }
  {
    const int nn = 5;
    const auto mesh = mesh::build_box_mesh(3, 2, 2, {1.5, 1.0, 0.5}, {false, true, false});
    const auto num = mesh::build_numbering(mesh, nn);
    const auto bn = sem::make_reference_basis(nn);
    const double h1 = 1.3, h2 = 0.6;
    sim::Exec exec(&num);
    solvers::SemOperator op3(mesh, num, bn, {h1, h2}, exec, "ax");
    const auto ng = static_cast<std::size_t>(num.num_global());
    const auto el = dense_element(nn, mesh.element_size(0), mesh.element_size(1), mesh.element_size(2), h1, h2);
    const std::size_t ppe = bn.points_per_element();
    std::vector<double> assembled(ng * ng, 0.0);
    for (int e = 0; e < mesh.num_elements(); ++e)
      for (std::size_t i = 0; i < ppe; ++i)
        for (std::size_t j = 0; j < ppe; ++j) {
          const auto gi = static_cast<std::size_t>(num.local_to_global[static_cast<std::size_t>(e) * ppe + i]);
          const auto gj = static_cast<std::size_t>(num.local_to_global[static_cast<std::size_t>(e) * ppe + j]);
          assembled[gi * ng + gj] += el[i * ppe + j];
        }
    const auto u = random_vector(ng, 77);
    std::vector<double> hu(ng);
    op3.apply(u, hu);
    for (std::size_t i = 0; i < ng; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < ng; ++j) s += assembled[i * ng + j] * u[j];
      worst = std::max(worst, std::abs(hu[i] - s));
    }
  }
  const double secs = seconds_since(t0);
  verdict(4, l2 < 1e-8 && worst <= 1e-10 && secs < 10.0,
          fmt("Poisson n=12 L2 error %.3g (< 1e-8, %d CG its); Helmholtz vs dense max diff %.3g (<= 1e-10); %.2f s", l2,
              sol.iterations, worst, secs));
}

// ---------------------------------------------------------------- 5
double amg_contraction(const solvers::AmgHierarchy& amg, const solvers::CsrMatrix& a) {
  const auto n = static_cast<std::size_t>(a.n);
  auto e = random_vector(n, 11);
  std::vector<double> ae(n), ve(n);
  auto anorm = [&](const std::vector<double>& v) {
    a.apply(v, ae);
    return std::sqrt(dot(v, ae));
  };
  solvers::remove_mean(e);
  double rho = 0.0;
  for (int it = 0; it < 50; ++it) {
    const double before = anorm(e);
    for (auto& x : e) x /= before;
    a.apply(e, ae);
    amg.vcycle(ae, ve);
    for (std::size_t i = 0; i < n; ++i) e[i] -= ve[i];
    solvers::remove_mean(e);
    rho = anorm(e);
  }
  return rho;
}

void criterion_preconditioners() {
  const auto t0 = Clock::now();
  const auto mesh = mesh::build_box_mesh(8, 8, 8, {1, 1, 1}, {true, true, true});
  const auto num = mesh::build_numbering(mesh, 6);
  const auto basis = sem::make_reference_basis(6);
  sim::Exec exec(&num);
  solvers::SemOperator op(mesh, num, basis, sem::HelmholtzFactors::pressure(), exec, "ax");
  auto x = solvers::interpolate(num, [](double x, double y, double z) {
    return std::sin(2 * pi * x) * std::cos(4 * pi * y) + std::cos(2 * pi * z) * std::sin(2 * pi * (x + y));
  });
  const auto noise = random_vector(x.size(), 3);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += 0.1 * noise[i];
  std::vector<double> b(x.size()), r(x.size());
  op.apply(x, b);
  std::string detail;
  bool ok = true;
  for (auto backend : {solvers::CoarseBackend::Xxt, solvers::CoarseBackend::Amg}) {
    solvers::SchwarzPreconditioner pc(mesh, num, basis, sem::HelmholtzFactors::pressure(), exec, {backend});
    solvers::KrylovConfig cfg;
    cfg.tolerance = 1e-8;
    cfg.restart = 30;
    cfg.max_iterations = 500;
    int its = -1;
    double res = 1.0;
    try {
      const auto sol = solvers::gmres_solve(op.map(), pc.map(), b, cfg);
      op.apply(sol.x, r);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
      res = norm(r) / norm(b);
      its = sol.iterations;
    } catch (const std::exception& e) {
      detail += std::string(solvers::to_string(backend)) + " failed: " + e.what() + "; ";
    }
    ok = ok && its >= 0 && res <= 1e-8;
    detail += fmt("%s %d its res %.2g; ", std::string(solvers::to_string(backend)).c_str(), its, res);
  }

  const auto a0 = solvers::coarse_assemble(mesh);
  const solvers::XxtSolver xxt(a0, mesh.vertices);
  auto cb = random_vector(static_cast<std::size_t>(a0.n), 21);
  solvers::remove_mean(cb);
  std::vector<double> cx(cb.size()), cax(cb.size());
  xxt.solve(cb, cx);
  a0.apply(cx, cax);
  for (std::size_t i = 0; i < cb.size(); ++i) cax[i] = cb[i] - cax[i];
  const double xres = norm(cax) / norm(cb);
  const solvers::AmgHierarchy amg(a0);
  const double rho = amg_contraction(amg, a0);
  const double secs = seconds_since(t0);
  ok = ok && xres <= 1e-10 && rho <= 0.9 && secs < 60.0;
  verdict(5, ok, detail + fmt("XXT coarse res %.2g (<= 1e-10); AMG V-cycle rho %.3f (<= 0.9); %.1f s", xres, rho, secs));
}

// ---------------------------------------------------------------- 6
double mean_pressure_iterations(int projection) {
  const auto mesh = mesh::build_box_mesh(4, 4, 4, {2 * pi, 2 * pi, 2 * pi}, {true, true, true});
  const auto num = mesh::build_numbering(mesh, 6);
  const auto basis = sem::make_reference_basis(6);
  const auto flow = time::make_flow_case("taylor_green", 100.0);
  sim::Exec exec(&num);
  time::SolverSettings settings;
  settings.projection = projection;
  time::FlowSolver solver(mesh, num, basis, exec, time::TimeScheme::make(2, 0.05, 100.0), settings, flow.forcing);
  auto state = solver.initial_state(flow.initial);
  double total = 0.0;
  for (int s = 0; s < 50; ++s) total += solver.advance(state).pressure_iterations;
  return total / 50.0;
}

void criterion_projection() {
  const double l0 = mean_pressure_iterations(0), l5 = mean_pressure_iterations(5);
  const double factor = l0 / l5;
  verdict(6, l5 <= 0.5 * l0,
          fmt("mean pressure iterations L=0 %.2f, L=5 %.2f, reduction factor %.2f (needs >= 2)", l0, l5, factor));
}

// ---------------------------------------------------------------- 7
struct Snapshot {
  time::Vec3Field u;
  std::vector<double> p;
};

Snapshot run_on_ranks(int p) {
  const auto mesh = mesh::build_box_mesh(4, 2, 2, {2 * pi, 2 * pi, 2 * pi}, {true, true, true});
  const auto num = mesh::build_numbering(mesh, 5);
  const auto basis = sem::make_reference_basis(5);
  const auto flow = time::make_flow_case("taylor_green", 100.0);
  sim::Cluster cluster(num, perf::builtin_profile("mira").comm_model());
  const int idx = cluster.attach(mesh::recursive_spectral_bisection(mesh, p), 1);
  cluster.set_distributed(idx);
  time::FlowSolver solver(mesh, num, basis, cluster, time::TimeScheme::make(2, 0.05, 100.0), {}, flow.forcing);
  auto state = solver.initial_state(flow.initial);
  for (int s = 0; s < 10; ++s) solver.advance(state);
  return {state.u.front(), state.p};
}

void criterion_rank_independence() {
  const auto t0 = Clock::now();
  const auto ref = run_on_ranks(1);
  double worst = 0.0;
  for (int p : {2, 4, 8}) {
    const auto s = run_on_ranks(p);
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < ref.u[static_cast<std::size_t>(c)].size(); ++i)
        worst = std::max(worst, std::abs(s.u[static_cast<std::size_t>(c)][i] - ref.u[static_cast<std::size_t>(c)][i]));
    for (std::size_t i = 0; i < ref.p.size(); ++i) worst = std::max(worst, std::abs(s.p[i] - ref.p[i]));
  }
  const double secs = seconds_since(t0);
  verdict(7, worst <= 1e-10 && secs < 30.0,
          fmt("max |u,p difference| P in {2,4,8} vs P=1 after 10 steps: %.3g (<= 1e-10); %.1f s", worst, secs));
}

// ---------------------------------------------------------------- 8, 9, 12
report::ExperimentConfig sweep_config(int e, std::vector<int> ranks) {
  report::ExperimentConfig c;
  c.elements = {e, e, e};
  c.n_per_dir = 6;
  c.warmup = 5;
  c.window = 5;
  c.backends = {solvers::CoarseBackend::Xxt, solvers::CoarseBackend::Amg};
  c.ranks = std::move(ranks);
  return c;
}

// Crossover of t_a(P) = t_c(P) on a fine geometric grid, refined by bisection.
double dense_crossover(const std::function<double(double)>& ta, const std::function<double(double)>& tc, double lo,
                       double hi) {
  const int steps = 200000;
  double prev = lo;
  for (int i = 1; i <= steps; ++i) {
    const double p = lo * std::pow(hi / lo, static_cast<double>(i) / steps);
    if (ta(p) <= tc(p)) {
      double a = prev, b = p;
      for (int k = 0; k < 100; ++k) {
        const double mid = std::sqrt(a * b);
        (ta(mid) <= tc(mid) ? b : a) = mid;
      }
      return std::sqrt(a * b);
    }
    prev = p;
  }
  return -1.0;
}

double synthetic_worst() {
  struct Synth {
    double a, c0, c1, c2;
  };
  const Synth cases[] = {{10.0, 0.01, 0.02, 0.0}, {50.0, 0.0, 0.05, 1e-4}, {3.0, 0.02, 0.0, 2e-3}, {200.0, 0.1, 0.3, 0.0}};
  double worst = 0.0;
  for (const auto& s : cases) {
    auto ta = [&](double p) { return s.a / p; };
    auto tc = [&](double p) { return s.c0 + s.c1 * std::log2(p) + s.c2 * p; };
    perf::ScalingCurve curve{1000000, {}};
    for (int p = 2; p <= (1 << 16); p *= 2) curve.samples.push_back({p, ta(p) + tc(p), ta(p), tc(p)});
    const auto rep = perf::strong_scaling_limit(curve);
    const double oracle = dense_crossover(ta, tc, 2.0, 65536.0);
    if (!rep.reached || oracle < 0) return 1.0;
    worst = std::max(worst, rel(rep.crossover_p, oracle));
  }
  return worst;
}

void criterion_scaling() {
  const auto t0 = Clock::now();
  const auto profile = perf::builtin_profile("mira");
  const auto big = report::run_scaling_experiment(sweep_config(8, {1, 2, 4, 8, 16, 32, 64, 128, 256, 512}), profile);

  // 8: XXT curve.
  const auto& xb = big.backends.at(0);
  const auto& smp = xb.curve.samples;
  double eff_lo = 1e9, eff_hi = 0.0;
  for (const auto& s : smp) {
    const double eff = smp.front().t_a / (s.p * s.t_a);
    eff_lo = std::min(eff_lo, eff);
    eff_hi = std::max(eff_hi, eff);
  }
  bool tc_ok = true;
  for (std::size_t i = 2; i < smp.size(); ++i) tc_ok = tc_ok && smp[i].t_c >= 0.95 * smp[i - 1].t_c;
  const auto& st = xb.strong;
  const bool bracket = st.reached && st.p_lo < st.p_hi && st.p_lo <= st.crossover_p && st.crossover_p <= st.p_hi;
  bool sign_ok = false;
  for (std::size_t i = 1; i < smp.size(); ++i)
    if (smp[i - 1].p == st.p_lo && smp[i].p == st.p_hi)
      sign_ok = smp[i - 1].t_a > smp[i - 1].t_c && smp[i].t_a <= smp[i].t_c;
  const double synth = synthetic_worst();
  verdict(8, eff_lo >= 0.9 && eff_hi <= 1.1 && tc_ok && bracket && sign_ok && synth <= 0.02,
          fmt("512 elements, P=1..512: T_a efficiency in [%.3f, %.3f] (need [0.9,1.1]); T_c %s; crossover P=%.1f in "
              "[%d, %d]; synthetic crossover vs dense oracle max err %.3f%% (<= 2%%); %.1f s",
              eff_lo, eff_hi, tc_ok ? "non-decreasing" : "DECREASES", st.crossover_p, st.p_lo, st.p_hi, 100 * synth,
              seconds_since(t0)));

  // 9: coarse-solve traffic at the largest P.
  const auto& cx = big.backends.at(0).cells.back();
  const auto& ca = big.backends.at(1).cells.back();
  verdict(9, cx.coarse_words > ca.coarse_words && ca.coarse_msgs > cx.coarse_msgs,
          fmt("P=%d coarse words XXT %llu vs AMG %llu (ratio %.1f); coarse calls AMG %llu vs XXT %llu (ratio %.1f)", cx.p,
              static_cast<unsigned long long>(cx.coarse_words), static_cast<unsigned long long>(ca.coarse_words),
              static_cast<double>(cx.coarse_words) / static_cast<double>(std::max<std::uint64_t>(ca.coarse_words, 1)),
              static_cast<unsigned long long>(ca.coarse_msgs), static_cast<unsigned long long>(cx.coarse_msgs),
              static_cast<double>(ca.coarse_msgs) / static_cast<double>(std::max<std::uint64_t>(cx.coarse_msgs, 1))));

  verdict(12, st.reached && st.n_per_p >= 1e3 && st.n_per_p <= 2e4,
          fmt("XXT crossover N/P = %.0f, band [1000, 20000]", st.n_per_p), false);
}

// ---------------------------------------------------------------- 11
// Fixed element size: 8^3 elements on a 4 pi box at P=64 and 16^3 on an
// 8 pi box at P=512, both N/P = 1728 with 2x2x2 elements per rank.
void criterion_weak_scaling() {
  const auto t0 = Clock::now();
  const auto profile = perf::builtin_profile("mira");
  auto c1 = sweep_config(8, {64});
  c1.box = {4 * pi, 4 * pi, 4 * pi};
  auto c2 = sweep_config(16, {512});
  c2.box = {8 * pi, 8 * pi, 8 * pi};
  const auto r1 = report::run_scaling_experiment(c1, profile);
  const auto r2 = report::run_scaling_experiment(c2, profile);
  double spread[2] = {0.0, 0.0};
  std::string detail;
  for (std::size_t bi = 0; bi < 2; ++bi) {
    const perf::ScalingCurve curves[] = {r1.backends[bi].curve, r2.backends[bi].curve};
    const auto table = perf::weak_scaling_table(curves);
    spread[bi] = -1.0;
    for (const auto& bucket : table)
      if (bucket.entries.size() == 2 && bucket.entries[0].n != bucket.entries[1].n) spread[bi] = bucket.spread();
    detail += fmt("%s: T(E=512,P=64)=%.4g s, T(E=4096,P=512)=%.4g s, spread %.1f%%; ", r1.backends[bi].backend.c_str(),
                  curves[0].samples[0].t_total, curves[1].samples[0].t_total, 100 * spread[bi]);
  }
  verdict(11, spread[0] >= 0.0 && spread[0] <= 0.2,
          detail + fmt("gated on the default xxt backend, tol 20%%; %.1f s", seconds_since(t0)));
}

// ---------------------------------------------------------------- 10
void criterion_histogram() {
  const auto h = mesh::partition_histogram(mesh::block_partition(1264032, 32768));
  const auto h2 = mesh::partition_histogram(mesh::block_partition(2 * 32768, 32768));
  const bool ok = h.size() == 2 && h.count(38) && h.count(39) && h.at(38) + h.at(39) == 32768 &&
                  38LL * h.at(38) + 39LL * h.at(39) == 1264032 && h2 == std::map<int, int>{{2, 32768}};
  verdict(10, ok,
          fmt("E=1264032 P=32768: %d ranks x 38, %d ranks x 39; E=2P: %zu distinct load(s), load %d", h.count(38) ? h.at(38) : 0,
              h.count(39) ? h.at(39) : 0, h2.size(), h2.empty() ? 0 : h2.begin()->first));
}

} // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_model_fit();
  criterion_nondimensional();
  criterion_gridpoints();
  criterion_solver_correctness();
  criterion_preconditioners();
  criterion_projection();
  criterion_rank_independence();
  criterion_histogram();
  criterion_scaling();
  criterion_weak_scaling();
  std::printf("acceptance: %d gated failure(s), %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
