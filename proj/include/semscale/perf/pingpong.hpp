#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "semscale/sim/comm_model.hpp"

namespace semscale::perf {

/// One message size: half round-trip times over the repetitions.
struct PingPongSample {
  std::uint64_t words = 1;
  double seconds = 0.0;  // median
  double min_seconds = 0.0;
  int reps = 0;
};

enum class Transport {
  Synthetic,  ///< times from the linear model, optionally with multiplicative noise
  InMemory,   ///< two threads exchanging through shared buffers
  Loopback,   ///< two threads over a local stream socket pair
};

/// "synthetic", "memory" or "loopback".
Transport parse_transport(std::string_view name);

struct PingPongOptions {
  Transport transport = Transport::Synthetic;
  std::vector<std::uint64_t> sizes;  // empty: powers of two 2^0..2^20 words
  int reps = 50;
  sim::CommModel model{};            // synthetic only
  double noise = 0.0;                // relative standard deviation, synthetic only
  std::uint64_t seed = 1;
};

std::vector<std::uint64_t> default_sizes();

/// Throws InvalidArgument on bad options and IoError when a transport fails.
std::vector<PingPongSample> pingpong_run(const PingPongOptions& options);

struct FitResult {
  double alpha_star = 0.0;
  double beta_star = 0.0;
  double residual_norm = 0.0;
  int samples = 0;
  bool alpha_clamped = false;
  bool beta_clamped = false;
};

enum class FitWeighting {
  Relative,    ///< minimise sum ((t - alpha* - beta* m) / t)^2
  Unweighted,  ///< plain least squares on (m, t)
};

/// Least squares of t = alpha* + beta* m over the sample medians. A negative
/// coefficient is clamped to zero (flagged) and the other one refitted.
/// Throws DegenerateFitError with fewer than two distinct sizes.
FitResult fit_alpha_beta(std::span<const PingPongSample> samples, FitWeighting weighting = FitWeighting::Relative);

/// Centred running median of the sample times (window 3, ends kept).
std::vector<double> median_filter(std::span<const PingPongSample> samples);

/// CSV with header m_words,t_seconds.
void write_pingpong_csv(std::ostream& os, std::span<const PingPongSample> samples);
std::vector<PingPongSample> read_pingpong_csv(std::istream& is);

} // namespace semscale::perf
