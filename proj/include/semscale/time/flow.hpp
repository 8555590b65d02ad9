#pragma once

#include <array>
#include <deque>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semscale/mesh/hex_mesh.hpp"
#include "semscale/mesh/numbering.hpp"
#include "semscale/sem/basis.hpp"
#include "semscale/sim/cluster.hpp"
#include "semscale/solvers/krylov.hpp"
#include "semscale/solvers/projection.hpp"
#include "semscale/solvers/schwarz.hpp"
#include "semscale/solvers/sem_operator.hpp"
#include "semscale/time/scheme.hpp"

namespace semscale::time {

using Vec3Field = std::array<std::vector<double>, 3>;
using VectorFunction = std::function<std::array<double, 3>(double t, double x, double y, double z)>;

/// Velocity history, pressure and stored nonlinear terms.
struct FlowState {
  int step = 0;
  double t = 0.0;
  /// u[0] = u^n (latest), u[1] = u^{n-1}, ... up to the scheme order.
  std::deque<Vec3Field> u;
  /// N(u) at the same levels as u.
  std::deque<Vec3Field> nonlinear;
  std::vector<double> p;
};

enum class FieldKind { Pressure, VelocityComponent };

/// "pressure" or "velocity"; throws InvalidArgument otherwise.
FieldKind parse_field_kind(std::string_view name);

struct SolverSettings {
  solvers::SchwarzOptions schwarz{};
  /// Projection space size L for pressure and each velocity component.
  int projection = 5;
  double pressure_tolerance = 1e-8;
  double velocity_tolerance = 1e-8;
  int restart = 30;
  int max_iterations = 500;
};

struct DispatchResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
  std::string path;  // "gmres" or "cg"
};

struct StepReport {
  int step = 0;
  double t = 0.0;
  int pressure_iterations = 0;
  int velocity_iterations = 0;  // summed over components
  double wall_seconds = 0.0;
  double model_seconds = 0.0;
  /// ||D(G - grad p)|| / ||D G|| after the pressure solve.
  double divergence = 0.0;
};

/// Convective term u . grad u from collocated derivatives, averaged at shared points.
Vec3Field eval_advection(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering,
                         const sem::ReferenceBasis& basis, const Vec3Field& u, sim::Exec& exec);

/// Collocated gradient of a continuous scalar field, averaged at shared points.
Vec3Field eval_gradient(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering,
                        const sem::ReferenceBasis& basis, std::span<const double> f, sim::Exec& exec);

/// Semi-implicit BDFk/EXTk Navier-Stokes stepper: one pressure Poisson solve
/// (GMRES + Schwarz) and one Helmholtz solve per velocity component (Jacobi CG),
/// each preceded by projection onto previous solutions.
class FlowSolver {
public:
  FlowSolver(const mesh::HexMesh& mesh, const mesh::GllNumbering& numbering, const sem::ReferenceBasis& basis,
             sim::Exec& exec, TimeScheme scheme, SolverSettings settings = {}, VectorFunction forcing = {});

  /// State at t = 0 from a velocity function (pressure zero).
  [[nodiscard]] FlowState initial_state(const VectorFunction& u0) const;

  /// Advances one step. NotConvergedError from a solver is rethrown with the step index.
  StepReport advance(FlowState& state);

  /// Solves H x = rhs with the solver for `kind` (no projection).
  DispatchResult helmholtz_dispatch(FieldKind kind, std::span<const double> rhs, double reference_norm = 0.0);

  [[nodiscard]] const TimeScheme& scheme() const { return scheme_; }
  [[nodiscard]] const SolverSettings& settings() const { return settings_; }
  [[nodiscard]] const solvers::ProjectionSpace& pressure_space() const { return p_space_; }
  [[nodiscard]] const solvers::ProjectionSpace& velocity_space(int c) const { return u_space_.at(static_cast<std::size_t>(c)); }
  [[nodiscard]] solvers::SchwarzPreconditioner& preconditioner() { return *schwarz_; }
  /// Sets h2 = b0/dt for the velocity operator.
  void set_velocity_order(const TimeScheme& s);

private:
  std::vector<double> weak_divergence(const Vec3Field& g);

  const mesh::HexMesh* mesh_;
  const mesh::GllNumbering* num_;
  const sem::ReferenceBasis* basis_;
  sim::Exec* exec_;
  TimeScheme scheme_;
  SolverSettings settings_;
  VectorFunction forcing_;
  std::vector<double> mass_;
  solvers::SemOperator hp_;
  solvers::SemOperator hu_;
  std::vector<double> hu_diag_;
  int velocity_order_ = 0;
  std::unique_ptr<solvers::SchwarzPreconditioner> schwarz_;
  solvers::ProjectionSpace p_space_;
  std::array<solvers::ProjectionSpace, 3> u_space_;
};

/// Flow set-ups on the periodic box [0, 2 pi]^3.
struct FlowCase {
  std::string name;
  VectorFunction initial;
  VectorFunction forcing;  // empty means none
  VectorFunction exact;    // empty when unknown
};

/// "taylor_green" (decaying, unforced), "manufactured" (u = sin t U with U the
/// Taylor-Green field, forced so that p = 0) or "zero".
FlowCase make_flow_case(std::string_view name, double reynolds);

/// Writes step,t,pressure_iterations,velocity_iterations,wall_seconds,model_seconds,divergence.
void write_step_csv(std::ostream& os, std::span<const StepReport> steps);

/// Max-norm velocity error against an exact solution at time t.
double velocity_error(const mesh::GllNumbering& numbering, const Vec3Field& u, const VectorFunction& exact, double t);

} // namespace semscale::time
