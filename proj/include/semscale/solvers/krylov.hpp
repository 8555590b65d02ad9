#pragma once

#include <functional>
#include <span>
#include <vector>

#include "semscale/sim/cluster.hpp"

namespace semscale::solvers {

/// y = A x. Implementations must not alias x and y.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct KrylovConfig {
  double tolerance = 1e-8;
  int max_iterations = 1000;
  int restart = 30;
  /// Residuals are measured relative to this norm; 0 means ||rhs||.
  double reference_norm = 0.0;

  /// Throws InvalidArgument unless tolerance > 0, max_iterations >= 1 and restart >= 1.
  void validate() const;
};

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
  /// Relative residual after each iteration (index 0 is the initial residual).
  std::vector<double> residual_history;
};

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
/// An empty `jacobi_diag` means no preconditioning. Reductions and vector
/// work go through `exec` when given.
/// Throws BreakdownError on non-finite values and NotConvergedError at the cap.
SolveResult cg_solve(const LinearMap& op, std::span<const double> rhs, std::span<const double> jacobi_diag,
                     const KrylovConfig& config, sim::Exec* exec = nullptr);

/// Restarted GMRES, right preconditioned (x = M z), classical Gram-Schmidt
/// applied twice with one batched reduction per pass. The reported residual
/// is the true residual ||b - A x|| at the end. A null preconditioner means M = I.
SolveResult gmres_solve(const LinearMap& op, const LinearMap& preconditioner, std::span<const double> rhs,
                        const KrylovConfig& config, sim::Exec* exec = nullptr);

} // namespace semscale::solvers
