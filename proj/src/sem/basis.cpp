#include "semscale/sem/basis.hpp"

#include <cmath>
#include <numbers>
#include <tuple>

#include "semscale/error.hpp"

namespace semscale::sem {

double legendre(int k, double x) {
  if (k == 0) return 1.0;
  double p_prev = 1.0;
  double p = x;
  for (int j = 2; j <= k; ++j) {
    const double p_next = ((2.0 * j - 1.0) * x * p - (j - 1.0) * p_prev) / j;
    p_prev = p;
    p = p_next;
  }
  return p;
}

std::pair<std::vector<double>, std::vector<double>> gll_nodes_weights(int n_per_dir) {
  if (n_per_dir < 2) throw InvalidArgument("gll_nodes_weights: n_per_dir must be >= 2");

  const int degree = n_per_dir - 1;
  const auto n = static_cast<std::size_t>(n_per_dir);
  std::vector<double> x(n);
  std::vector<double> w(n);

  // Newton on (1 - x^2) P'_N, written through the recurrence identity
  // (1 - x^2) P'_N = N (P_{N-1} - x P_N); Chebyshev-Gauss-Lobatto start.
  for (std::size_t i = 0; i < n; ++i) {
    double xi = -std::cos(std::numbers::pi * static_cast<double>(i) / degree);
    if (i == 0 || i + 1 == n) {
      x[i] = xi;
      continue;
    }
    for (int it = 0; it < 100; ++it) {
      const double pn = legendre(degree, xi);
      const double pn1 = legendre(degree - 1, xi);
      const double delta = (xi * pn - pn1) / (n_per_dir * pn);
      xi -= delta;
      if (std::abs(delta) <= 1e-14) break;
    }
    x[i] = xi;
  }
  x.front() = -1.0;
  x.back() = 1.0;

  // Symmetric pairing removes roundoff asymmetry between x_i and -x_{N-i}.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double mag = 0.5 * (x[n - 1 - i] - x[i]);
    x[i] = -mag;
    x[n - 1 - i] = mag;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const double pn = legendre(degree, x[i]);
    w[i] = 2.0 / (degree * (degree + 1.0) * pn * pn);
  }
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double avg = 0.5 * (w[i] + w[n - 1 - i]);
    w[i] = avg;
    w[n - 1 - i] = avg;
  }
  return {std::move(x), std::move(w)};
}

namespace {

std::vector<double> barycentric_weights(std::span<const double> nodes) {
  const std::size_t n = nodes.size();
  std::vector<double> lambda(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k != j) lambda[j] *= nodes[j] - nodes[k];
    }
    lambda[j] = 1.0 / lambda[j];
  }
  return lambda;
}

} // namespace

std::vector<double> diff_matrix(std::span<const double> nodes) {
  const std::size_t n = nodes.size();
  const auto lambda = barycentric_weights(nodes);
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = (lambda[j] / lambda[i]) / (nodes[i] - nodes[j]);
      d[i * n + j] = v;
      row_sum += v;
    }
    // Negative-sum trick: D * 1 = 0 holds to roundoff by construction.
    d[i * n + i] = -row_sum;
  }
  return d;
}

ReferenceBasis make_reference_basis(int n_per_dir) {
  ReferenceBasis basis;
  basis.n_per_dir = n_per_dir;
  std::tie(basis.nodes, basis.weights) = gll_nodes_weights(n_per_dir);
  basis.diff_matrix = diff_matrix(basis.nodes);
  const auto n = static_cast<std::size_t>(n_per_dir);
  basis.diff_matrix_t.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) basis.diff_matrix_t[j * n + i] = basis.diff_matrix[i * n + j];
  return basis;
}

std::vector<double> interpolation_matrix(std::span<const double> nodes, std::span<const double> targets) {
  const std::size_t n = nodes.size();
  const auto lambda = barycentric_weights(nodes);
  std::vector<double> m(targets.size() * n, 0.0);
  for (std::size_t q = 0; q < targets.size(); ++q) {
    const double t = targets[q];
    std::size_t exact = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (t == nodes[j]) exact = j;
    }
    if (exact < n) {
      m[q * n + exact] = 1.0;
      continue;
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) denom += lambda[j] / (t - nodes[j]);
    for (std::size_t j = 0; j < n; ++j) m[q * n + j] = (lambda[j] / (t - nodes[j])) / denom;
  }
  return m;
}

} // namespace semscale::sem
