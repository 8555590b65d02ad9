#include "semscale/time/scheme.hpp"

#include <algorithm>

#include "semscale/error.hpp"

namespace semscale::time {

namespace {

void check_order(int k) {
  if (k < 1 || k > 3) throw InvalidArgument("time scheme order must be 1, 2 or 3");
}

} // namespace

std::vector<double> bdf_coefficients(int k) {
  check_order(k);
  switch (k) {
    case 1: return {1.0, -1.0};
    case 2: return {1.5, -2.0, 0.5};
    default: return {11.0 / 6.0, -3.0, 1.5, -1.0 / 3.0};
  }
}

std::vector<double> ext_coefficients(int k) {
  check_order(k);
  switch (k) {
    case 1: return {1.0};
    case 2: return {2.0, -1.0};
    default: return {3.0, -3.0, 1.0};
  }
}

TimeScheme TimeScheme::make(int k, double dt, double reynolds) {
  check_order(k);
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (!(reynolds > 0.0)) throw InvalidArgument("Reynolds number must be positive");
  return {k, dt, reynolds, bdf_coefficients(k), ext_coefficients(k)};
}

TimeScheme TimeScheme::ramped(int step) const {
  if (step < 1) throw InvalidArgument("step index is 1-based");
  return make(std::min(k, step), dt, reynolds);
}

} // namespace semscale::time
