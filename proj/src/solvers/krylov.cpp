#include "semscale/solvers/krylov.hpp"

#include <chrono>
#include <cmath>

#include "semscale/error.hpp"

namespace semscale::solvers {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_finite(double v, const char* where) {
  if (!std::isfinite(v)) throw BreakdownError(std::string(where) + ": non-finite value encountered");
}

} // namespace

void KrylovConfig::validate() const {
  if (!(tolerance > 0.0)) throw InvalidArgument("KrylovConfig: tolerance must be positive");
  if (max_iterations < 1) throw InvalidArgument("KrylovConfig: max_iterations must be >= 1");
  if (restart < 1) throw InvalidArgument("KrylovConfig: restart must be >= 1");
}

SolveResult cg_solve(const LinearMap& op, std::span<const double> rhs, std::span<const double> jacobi_diag,
                     const KrylovConfig& config, sim::Exec* exec) {
  config.validate();
  sim::Exec serial;
  sim::Exec& ex = exec ? *exec : serial;
  const std::size_t n = rhs.size();
  if (!jacobi_diag.empty() && jacobi_diag.size() != n) throw InvalidArgument("cg_solve: diagonal size mismatch");
  for (double v : rhs)
    if (!std::isfinite(v)) throw InvalidArgument("cg_solve: non-finite rhs");

  SolveResult res;
  res.x.assign(n, 0.0);
  std::vector<double> r(rhs.begin(), rhs.end()), z(n), p(n), q(n);
  const double bnorm = ex.norm(r, "cg");
  const double ref = config.reference_norm > 0.0 ? config.reference_norm : bnorm;
  if (bnorm == 0.0 || ref == 0.0) {
    res.residual_history.push_back(0.0);
    return res;
  }
  const double target = config.tolerance * ref;
  res.residual_history.push_back(bnorm / ref);
  if (bnorm <= target) {
    res.relative_residual = bnorm / ref;
    return res;
  }

  auto precondition = [&]() {
    const auto t0 = Clock::now();
    if (jacobi_diag.empty()) {
      z = r;
    } else {
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / jacobi_diag[i];
    }
    ex.charge_points(1.0, seconds_since(t0), "cg");
  };

  precondition();
  p = z;
  double rz = ex.dot(r, z, "cg");
  double best_norm = bnorm;
  std::vector<double> best = res.x;
  for (int it = 1; it <= config.max_iterations; ++it) {
    op(p, q);
    const double pq = ex.dot(p, q, "cg");
    check_finite(pq, "cg_solve");
    if (pq <= 0.0) throw BreakdownError("cg_solve: operator not positive definite along search direction");
    const double alpha = rz / pq;
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    ex.charge_points(4.0, seconds_since(t0), "cg");
    precondition();
    std::vector<std::span<const double>> bs{z, r};
    double out[2];
    ex.dot_many(r, bs, out, "cg");
    const double rz_new = out[0];
    const double rnorm = std::sqrt(std::max(out[1], 0.0));
    check_finite(rnorm, "cg_solve");
    res.residual_history.push_back(rnorm / ref);
    res.iterations = it;
    res.relative_residual = rnorm / ref;
    if (rnorm < best_norm) {
      best_norm = rnorm;
      best = res.x;
    }
    if (rnorm <= target) return res;
    const double beta = rz_new / rz;
    rz = rz_new;
    const auto t1 = Clock::now();
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ex.charge_points(2.0, seconds_since(t1), "cg");
  }
  throw NotConvergedError("cg_solve: iteration cap reached", std::move(best), res.iterations, best_norm / ref);
}

SolveResult gmres_solve(const LinearMap& op, const LinearMap& preconditioner, std::span<const double> rhs,
                        const KrylovConfig& config, sim::Exec* exec) {
  config.validate();
  sim::Exec serial;
  sim::Exec& ex = exec ? *exec : serial;
  const std::size_t n = rhs.size();
  for (double v : rhs)
    if (!std::isfinite(v)) throw InvalidArgument("gmres_solve: non-finite rhs");

  SolveResult res;
  res.x.assign(n, 0.0);
  std::vector<double> r(rhs.begin(), rhs.end());
  double rnorm = ex.norm(r, "gmres");
  const double ref = config.reference_norm > 0.0 ? config.reference_norm : rnorm;
  res.residual_history.push_back(ref > 0.0 ? rnorm / ref : 0.0);
  if (rnorm == 0.0 || ref == 0.0) return res;
  const double target = config.tolerance * ref;
  if (rnorm <= target) {
    res.relative_residual = rnorm / ref;
    return res;
  }

  const auto m = static_cast<std::size_t>(config.restart);
  std::vector<std::vector<double>> v(m + 1, std::vector<double>(n)), zvec(m, std::vector<double>(n));
  std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1), w(n), coeffs(m + 1), tmp(n);

  int total = 0;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / rnorm;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = rnorm;
    std::size_t k = 0;
    for (; k < m && total < config.max_iterations; ++k) {
      if (preconditioner) {
        preconditioner(v[k], zvec[k]);
      } else {
        zvec[k] = v[k];
      }
      op(zvec[k], w);
      for (auto& col : h) col[k] = 0.0;
      for (int pass = 0; pass < 2; ++pass) {
        std::vector<std::span<const double>> basis(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k + 1));
        ex.dot_many(w, basis, std::span<double>(coeffs.data(), k + 1), "gmres");
        const auto t0 = Clock::now();
        for (std::size_t j = 0; j <= k; ++j) {
          h[j][k] += coeffs[j];
          for (std::size_t i = 0; i < n; ++i) w[i] -= coeffs[j] * v[j][i];
        }
        ex.charge_points(2.0 * static_cast<double>(k + 1), std::chrono::duration<double>(Clock::now() - t0).count(), "gmres");
      }
      const double hn = ex.norm(w, "gmres");
      check_finite(hn, "gmres_solve");
      h[k + 1][k] = hn;
      for (std::size_t j = 0; j < k; ++j) {
        const double a = h[j][k], b = h[j + 1][k];
        h[j][k] = cs[j] * a + sn[j] * b;
        h[j + 1][k] = -sn[j] * a + cs[j] * b;
      }
      const double denom = std::hypot(h[k][k], h[k + 1][k]);
      if (denom == 0.0) throw BreakdownError("gmres_solve: zero Hessenberg column");
      cs[k] = h[k][k] / denom;
      sn[k] = h[k + 1][k] / denom;
      h[k][k] = denom;
      h[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++total;
      const double est = std::abs(g[k + 1]);
      res.residual_history.push_back(est / ref);
      const bool happy = hn <= 1e-14 * std::abs(h[k][k]);
      if (est <= target || happy) {
        ++k;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) v[k + 1][i] = w[i] / hn;
    }

    // Back substitution and update x += Z y.
    std::vector<double> y(k);
    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t j = i + 1; j < k; ++j) s -= h[i][j] * y[j];
      y[i] = s / h[i][i];
      check_finite(y[i], "gmres_solve");
    }
    const auto t0 = Clock::now();
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) res.x[i] += y[j] * zvec[j][i];
    op(res.x, tmp);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - tmp[i];
    ex.charge_points(2.0 * static_cast<double>(k) + 1.0, seconds_since(t0), "gmres");
    rnorm = ex.norm(r, "gmres");
    check_finite(rnorm, "gmres_solve");
    res.iterations = total;
    res.relative_residual = rnorm / ref;
    if (rnorm <= target) return res;
    if (total >= config.max_iterations)
      throw NotConvergedError("gmres_solve: iteration cap reached", res.x, total, rnorm / ref);
  }
}

} // namespace semscale::solvers
