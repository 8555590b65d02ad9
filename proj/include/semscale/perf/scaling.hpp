#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace semscale::perf {

/// N = E n^3. Throws InvalidArgument for E < 1 or n < 2.
std::uint64_t gridpoints(std::uint64_t elements, int n_per_dir);

struct ScalingSample {
  int p = 1;
  double t_total = 0.0;
  double t_a = 0.0;
  double t_c = 0.0;
};

/// Times of one problem size over increasing rank counts.
struct ScalingCurve {
  std::uint64_t n = 0;
  std::vector<ScalingSample> samples;
  [[nodiscard]] int p1() const { return samples.front().p; }
  /// Throws InvalidArgument unless P is strictly increasing and times are positive.
  void validate() const;
};

struct StrongScalingReport {
  bool reached = false;
  double crossover_p = 0.0;
  double n_per_p = 0.0;
  /// Bracketing samples (rank counts and their N/P).
  int p_lo = 0, p_hi = 0;
  double n_per_p_lo = 0.0, n_per_p_hi = 0.0;
};

/// First P where T_a drops to T_c, interpolating log T_a - log T_c linearly in
/// log P between the bracketing samples. Not reached without a sign change
/// (or when T_c already dominates at P1). Requires >= 2 samples.
StrongScalingReport strong_scaling_limit(const ScalingCurve& curve);

/// T(P1) P1 / P for each sample, anchored on the computation time T_a.
std::vector<double> ideal_line(const ScalingCurve& curve);

struct WeakEntry {
  std::uint64_t n = 0;
  int p = 0;
  double t_total = 0.0;
};

struct WeakBucket {
  int log2_n_per_p = 0;  // bucket key: round(log2(N/P))
  std::vector<WeakEntry> entries;
  /// (max - min) / min of t_total within the bucket.
  [[nodiscard]] double spread() const;
};

/// Groups every sample of every curve by N/P rounded to a power of two.
std::vector<WeakBucket> weak_scaling_table(std::span<const ScalingCurve> curves);

/// 500 fields of 8-byte words per grid point.
std::uint64_t memory_footprint(std::uint64_t n);

/// ceil(footprint / mem_per_rank), at least 1 and, when elements > 0, at most
/// one element per rank. Throws InvalidArgument for mem_per_rank <= 0.
std::uint64_t min_ranks(std::uint64_t n, double mem_per_rank_bytes, std::uint64_t elements = 0);

} // namespace semscale::perf
