#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace semscale {

/// Precondition violated by a caller (bad sizes, out-of-range parameters, unknown tags).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Graph handed to a spectral method has more than one connected component.
class NotConnectedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// More ranks requested than there are elements to distribute.
class TooManyRanksError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A Krylov iteration produced a non-finite value.
class BreakdownError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Iteration cap reached before the tolerance; carries the best iterate found.
class NotConvergedError : public std::runtime_error {
public:
  NotConvergedError(const std::string& what, std::vector<double> best, int iterations, double residual)
      : std::runtime_error(what), best_iterate(std::move(best)), iterations(iterations),
        relative_residual(residual) {}

  std::vector<double> best_iterate;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Matrix factorization hit a non-positive pivot.
class FactorizationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Least-squares fit without enough distinct abscissae.
class DegenerateFitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace semscale
