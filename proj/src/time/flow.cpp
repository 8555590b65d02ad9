#include "semscale/time/flow.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "semscale/error.hpp"

namespace semscale::time {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::size_t global_size(const mesh::GllNumbering& num) { return static_cast<std::size_t>(num.num_global()); }

void scatter(const mesh::GllNumbering& num, std::span<const double> global, std::span<double> local) {
  for (std::size_t l = 0; l < local.size(); ++l) local[l] = global[static_cast<std::size_t>(num.local_to_global[l])];
}

// Sums element-local values into global points and averages by multiplicity.
std::vector<double> average(const mesh::GllNumbering& num, std::span<const double> local, sim::Exec& exec,
                            std::string_view site) {
  std::vector<double> g(global_size(num));
  exec.assemble(local, g, site);
  const auto mult = num.multiplicity();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] /= static_cast<double>(mult[i]);
  return g;
}

// Local derivative fields du/dx_d for every element.
std::array<std::vector<double>, 3> local_gradient(const mesh::HexMesh& mesh, const mesh::GllNumbering& num,
                                                  sem::HelmholtzKernel& kernel, std::span<const double> local) {
  const std::size_t ppe = num.points_per_element();
  std::array<std::vector<double>, 3> d;
  for (auto& v : d) v.resize(local.size());
  const auto geom = mesh.geometry();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto off = static_cast<std::size_t>(e) * ppe;
    for (int dim = 0; dim < 3; ++dim)
      kernel.gradient(geom, dim, local.subspan(off, ppe), std::span<double>(d[static_cast<std::size_t>(dim)]).subspan(off, ppe));
  }
  return d;
}

double gradient_flops(const mesh::GllNumbering& num) {
  const auto n = static_cast<double>(num.n_per_dir);
  return 3.0 * (2.0 * n * n * n * n + n * n * n);
}

} // namespace

FieldKind parse_field_kind(std::string_view name) {
  if (name == "pressure") return FieldKind::Pressure;
  if (name == "velocity" || name == "velocity_component") return FieldKind::VelocityComponent;
  throw InvalidArgument("unknown field kind: " + std::string(name));
}

Vec3Field eval_gradient(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering,
                        const sem::ReferenceBasis& basis, std::span<const double> f, sim::Exec& exec) {
  const auto t0 = Clock::now();
  sem::HelmholtzKernel kernel(basis);
  std::vector<double> local(numbering.num_local());
  scatter(numbering, f, local);
  const auto d = local_gradient(mesh, numbering, kernel, local);
  exec.charge_elements(gradient_flops(numbering), seconds_since(t0), "gradient");
  Vec3Field out;
  for (std::size_t c = 0; c < 3; ++c) out[c] = average(numbering, d[c], exec, "gradient");
  return out;
}

Vec3Field eval_advection(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering,
                         const sem::ReferenceBasis& basis, const Vec3Field& u, sim::Exec& exec) {
  for (const auto& c : u)
    if (c.size() != global_size(numbering)) throw InvalidArgument("eval_advection: size mismatch");
  const auto t0 = Clock::now();
  sem::HelmholtzKernel kernel(basis);
  const std::size_t nl = numbering.num_local();
  std::array<std::vector<double>, 3> ul;
  for (std::size_t c = 0; c < 3; ++c) {
    ul[c].resize(nl);
    scatter(numbering, u[c], ul[c]);
  }
  Vec3Field out;
  std::vector<double> n_local(nl);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto d = local_gradient(mesh, numbering, kernel, ul[i]);
    for (std::size_t l = 0; l < nl; ++l) n_local[l] = ul[0][l] * d[0][l] + ul[1][l] * d[1][l] + ul[2][l] * d[2][l];
    out[i] = average(numbering, n_local, exec, "advection");
  }
  const auto n3 = static_cast<double>(numbering.points_per_element());
  exec.charge_elements(3.0 * gradient_flops(numbering) + 15.0 * n3, seconds_since(t0), "advection");
  return out;
}

FlowSolver::FlowSolver(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering,
                       const sem::ReferenceBasis& basis, sim::Exec& exec, TimeScheme scheme, SolverSettings settings,
                       VectorFunction forcing)
    : mesh_(&mesh), num_(&numbering), basis_(&basis), exec_(&exec), scheme_(std::move(scheme)),
      settings_(settings), forcing_(std::move(forcing)), mass_(solvers::assembled_mass(mesh, numbering, basis)),
      hp_(mesh, numbering, basis, sem::HelmholtzFactors::pressure(), exec, "ax_pressure"),
      hu_(mesh, numbering, basis, {1.0, 1.0}, exec, "ax_velocity"), p_space_(settings.projection),
      u_space_{solvers::ProjectionSpace(settings.projection), solvers::ProjectionSpace(settings.projection),
               solvers::ProjectionSpace(settings.projection)} {
  scheme_ = TimeScheme::make(scheme_.k, scheme_.dt, scheme_.reynolds);
  schwarz_ = std::make_unique<solvers::SchwarzPreconditioner>(mesh, numbering, basis,
                                                              sem::HelmholtzFactors::pressure(), exec, settings.schwarz);
  set_velocity_order(scheme_);
}

void FlowSolver::set_velocity_order(const TimeScheme& s) {
  hu_.set_factors(sem::HelmholtzFactors::velocity(s.reynolds, s.b[0], s.dt));
  hu_diag_ = hu_.diagonal();
  velocity_order_ = s.k;
  for (auto& sp : u_space_) sp.clear();
}

FlowState FlowSolver::initial_state(const VectorFunction& u0) const {
  FlowState st;
  Vec3Field u;
  for (auto& c : u) c.assign(global_size(*num_), 0.0);
  if (u0)
    for (int g = 0; g < num_->num_global(); ++g) {
      const auto x = num_->point(g);
      const auto v = u0(0.0, x[0], x[1], x[2]);
      for (std::size_t c = 0; c < 3; ++c) u[c][static_cast<std::size_t>(g)] = v[c];
    }
  sim::Exec serial(num_);
  st.nonlinear.push_front(eval_advection(*mesh_, *num_, *basis_, u, serial));
  st.u.push_front(std::move(u));
  st.p.assign(global_size(*num_), 0.0);
  return st;
}

std::vector<double> FlowSolver::weak_divergence(const Vec3Field& g) {
  const auto t0 = Clock::now();
  sem::HelmholtzKernel kernel(*basis_);
  const std::size_t nl = num_->num_local(), ppe = num_->points_per_element();
  std::array<std::vector<double>, 3> gl;
  for (std::size_t c = 0; c < 3; ++c) {
    gl[c].resize(nl);
    scatter(*num_, g[c], gl[c]);
  }
  std::vector<double> local(nl, 0.0), out(global_size(*num_));
  const auto geom = mesh_->geometry();
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    const auto off = static_cast<std::size_t>(e) * ppe;
    auto sub = [&](std::vector<double>& v) { return std::span<const double>(v).subspan(off, ppe); };
    kernel.weak_divergence(geom, sub(gl[0]), sub(gl[1]), sub(gl[2]), std::span<double>(local).subspan(off, ppe));
  }
  exec_->charge_elements(gradient_flops(*num_) + 3.0 * static_cast<double>(ppe), seconds_since(t0), "divergence");
  exec_->assemble(local, out, "divergence");
  return out;
}

DispatchResult FlowSolver::helmholtz_dispatch(FieldKind kind, std::span<const double> rhs, double reference_norm) {
  solvers::KrylovConfig cfg;
  cfg.restart = settings_.restart;
  cfg.max_iterations = settings_.max_iterations;
  cfg.reference_norm = reference_norm;
  DispatchResult out;
  solvers::SolveResult r;
  if (kind == FieldKind::Pressure) {
    cfg.tolerance = settings_.pressure_tolerance;
    r = solvers::gmres_solve(hp_.map(), schwarz_->map(), rhs, cfg, exec_);
    solvers::remove_mean(r.x);
    out.path = "gmres";
  } else {
    cfg.tolerance = settings_.velocity_tolerance;
    r = solvers::cg_solve(hu_.map(), rhs, hu_diag_, cfg, exec_);
    out.path = "cg";
  }
  out.x = std::move(r.x);
  out.iterations = r.iterations;
  out.relative_residual = r.relative_residual;
  return out;
}

StepReport FlowSolver::advance(FlowState& state) {
  if (state.u.empty() || state.u.size() != state.nonlinear.size())
    throw InvalidArgument("FlowSolver::advance: state has no history");
  const auto wall0 = Clock::now();
  StepReport rep;
  rep.step = state.step + 1;
  const TimeScheme s = scheme_.ramped(std::min(rep.step, static_cast<int>(state.u.size())));
  if (s.k != velocity_order_) set_velocity_order(s);
  const double tn = state.t + s.dt;
  const std::size_t n = global_size(*num_);

  try {
    // G = f^n - sum a_j N(u^{n-j}) - sum_{j>=1} (b_j / dt) u^{n-j}
    Vec3Field g;
    for (auto& c : g) c.assign(n, 0.0);
    if (forcing_)
      for (int i = 0; i < num_->num_global(); ++i) {
        const auto x = num_->point(i);
        const auto f = forcing_(tn, x[0], x[1], x[2]);
        for (std::size_t c = 0; c < 3; ++c) g[c][static_cast<std::size_t>(i)] = f[c];
      }
    const auto t0 = Clock::now();
    for (std::size_t j = 1; j <= static_cast<std::size_t>(s.k); ++j) {
      const double a = s.a[j - 1], b = s.b[j] / s.dt;
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < n; ++i) g[c][i] -= a * state.nonlinear[j - 1][c][i] + b * state.u[j - 1][c][i];
    }
    exec_->charge_points(12.0 * s.k, seconds_since(t0), "rhs");

    // Pressure: A p = D G, projected onto previous solutions.
    auto fp = weak_divergence(g);
    solvers::remove_mean(fp);
    const auto div0 = fp;
    const double fnorm = exec_->norm(fp, "rhs");
    auto p = p_space_.project_out(fp, *exec_);
    if (fnorm > 0.0) {
      const auto dp = helmholtz_dispatch(FieldKind::Pressure, fp, fnorm);
      rep.pressure_iterations = dp.iterations;
      for (std::size_t i = 0; i < n; ++i) p[i] += dp.x[i];
      solvers::remove_mean(p);
      p_space_.update(p, hp_.map(), *exec_);
      // Divergence functional D(G - grad p) = D G - A p, evaluated off the books.
      sim::Exec quiet(num_);
      solvers::SemOperator check(*mesh_, *num_, *basis_, sem::HelmholtzFactors::pressure(), quiet, "check");
      std::vector<double> ap(n);
      check.apply(p, ap);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        num += (div0[i] - ap[i]) * (div0[i] - ap[i]);
        den += div0[i] * div0[i];
      }
      rep.divergence = std::sqrt(num / den);
    }
    state.p = std::move(p);

    // Velocity: ((1/Re) A + (b0/dt) B) u = B (G - grad p), per component.
    const auto gp = eval_gradient(*mesh_, *num_, *basis_, state.p, *exec_);
    Vec3Field u;
    for (std::size_t c = 0; c < 3; ++c) {
      std::vector<double> fu(n);
      for (std::size_t i = 0; i < n; ++i) fu[i] = mass_[i] * (g[c][i] - gp[c][i]);
      const double unorm = exec_->norm(fu, "rhs");
      auto& space = u_space_[c];
      u[c] = space.project_out(fu, *exec_);
      if (unorm > 0.0) {
        const auto du = helmholtz_dispatch(FieldKind::VelocityComponent, fu, unorm);
        rep.velocity_iterations += du.iterations;
        for (std::size_t i = 0; i < n; ++i) u[c][i] += du.x[i];
        space.update(u[c], hu_.map(), *exec_);
      }
    }
    state.nonlinear.push_front(eval_advection(*mesh_, *num_, *basis_, u, *exec_));
    state.u.push_front(std::move(u));
    while (static_cast<int>(state.u.size()) > scheme_.k) {
      state.u.pop_back();
      state.nonlinear.pop_back();
    }
  } catch (const NotConvergedError& e) {
    throw NotConvergedError("step " + std::to_string(rep.step) + ": " + e.what(), e.best_iterate, e.iterations,
                            e.relative_residual);
  }
  state.t = tn;
  state.step = rep.step;
  rep.t = tn;
  rep.wall_seconds = seconds_since(wall0);
  return rep;
}

FlowCase make_flow_case(std::string_view name, double reynolds) {
  if (!(reynolds > 0.0)) throw InvalidArgument("Reynolds number must be positive");
  auto tg = [](double x, double y, double z) {
    return std::array<double, 3>{std::sin(x) * std::cos(y) * std::cos(z), -std::cos(x) * std::sin(y) * std::cos(z), 0.0};
  };
  FlowCase fc;
  fc.name = std::string(name);
  if (name == "zero") return fc;
  if (name == "taylor_green") {
    fc.initial = [tg](double, double x, double y, double z) { return tg(x, y, z); };
    return fc;
  }
  if (name == "manufactured") {
    // u = sin(t) U with lap U = -3 U and (U . grad) U = (sx cx cz^2, sy cy cz^2, 0).
    fc.initial = [](double, double, double, double) { return std::array<double, 3>{0.0, 0.0, 0.0}; };
    fc.exact = [tg](double t, double x, double y, double z) {
      auto v = tg(x, y, z);
      for (auto& c : v) c *= std::sin(t);
      return v;
    };
    fc.forcing = [tg, reynolds](double t, double x, double y, double z) {
      const auto v = tg(x, y, z);
      const double cz2 = std::cos(z) * std::cos(z);
      const std::array<double, 3> adv{std::sin(x) * std::cos(x) * cz2, std::sin(y) * std::cos(y) * cz2, 0.0};
      const double st = std::sin(t);
      std::array<double, 3> f{};
      for (std::size_t c = 0; c < 3; ++c) f[c] = std::cos(t) * v[c] + st * st * adv[c] + 3.0 / reynolds * st * v[c];
      return f;
    };
    return fc;
  }
  throw InvalidArgument("unknown flow case: " + std::string(name));
}

void write_step_csv(std::ostream& os, std::span<const StepReport> steps) {
  os << "step,t,pressure_iterations,velocity_iterations,wall_seconds,model_seconds,divergence\n";
  char buf[256];
  for (const auto& s : steps) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%d,%d,%.9g,%.9g,%.9g\n", s.step, s.t, s.pressure_iterations,
                  s.velocity_iterations, s.wall_seconds, s.model_seconds, s.divergence);
    os << buf;
  }
}

double velocity_error(const mesh::GllNumbering& numbering, const Vec3Field& u, const VectorFunction& exact, double t) {
  double err = 0.0;
  for (int g = 0; g < numbering.num_global(); ++g) {
    const auto x = numbering.point(g);
    const auto v = exact(t, x[0], x[1], x[2]);
    for (std::size_t c = 0; c < 3; ++c) err = std::max(err, std::abs(u[c][static_cast<std::size_t>(g)] - v[c]));
  }
  return err;
}

} // namespace semscale::time
