#pragma once

#include <vector>

namespace semscale::time {

/// BDF coefficients b_0..b_k: sum_j b_j u^{n-j} / dt approximates du/dt at t_n.
/// Throws InvalidArgument unless 1 <= k <= 3.
std::vector<double> bdf_coefficients(int k);

/// Extrapolation weights a_1..a_k: sum_j a_j g^{n-j} approximates g(t_n).
std::vector<double> ext_coefficients(int k);

struct TimeScheme {
  int k = 2;
  double dt = 1e-2;
  double reynolds = 1.0;
  std::vector<double> b;  // b_0..b_k
  std::vector<double> a;  // a_1..a_k (a[0] is a_1)

  /// Throws InvalidArgument on k outside 1..3, dt <= 0 or Re <= 0.
  static TimeScheme make(int k, double dt, double reynolds);
  /// Scheme used at step `step` (1-based) during the startup ramp: order min(k, step).
  [[nodiscard]] TimeScheme ramped(int step) const;
};

} // namespace semscale::time
