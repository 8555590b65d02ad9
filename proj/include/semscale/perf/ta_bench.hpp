#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace semscale::perf {

enum class TaMode { Measured, Synthetic };

struct TaOptions {
  TaMode mode = TaMode::Measured;
  double synthetic_rate = 1e9;  // flop/s
  std::size_t working_set_bytes = std::size_t{256} << 20;
  double min_seconds = 0.01;    // below this a test is repeated with more passes
  std::vector<int> orders{10, 11, 12, 13};  // points per direction
};

/// One streamed tensor-contraction test.
struct TaRecord {
  int n_per_dir = 0;
  int layout = 0;  // contraction axis: 0 unit stride, 1 stride n, 2 stride n^2
  std::uint64_t elements = 0;  // element batch size
  int passes = 0;
  std::uint64_t flops = 0;
  double seconds = 0.0;
  [[nodiscard]] double rate() const { return static_cast<double>(flops) / seconds; }
};

struct TaReport {
  std::vector<TaRecord> records;
  double t_a = 0.0;  // seconds per flop, 1 / mean(rate)
};

/// Orders x 3 layouts of D applied to a batch of elements larger than the
/// working set, cycling so each contraction reads cold data.
TaReport measure_ta(const TaOptions& options = {});

} // namespace semscale::perf
