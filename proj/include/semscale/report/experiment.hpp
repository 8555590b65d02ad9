#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "semscale/perf/profile.hpp"
#include "semscale/perf/scaling.hpp"
#include "semscale/report/config.hpp"
#include "semscale/sim/instrumentation.hpp"
#include "semscale/time/flow.hpp"

namespace semscale::report {

/// Counters of one (backend, P) cell over the measured window.
struct CellCounters {
  int p = 1;
  std::uint64_t msgs = 0;   // point-to-point messages plus collective calls, all ranks
  std::uint64_t words = 0;  // point-to-point plus collective words, all ranks
  std::uint64_t coarse_msgs = 0;
  std::uint64_t coarse_words = 0;
  std::map<int, int> histogram;  // elements per rank -> ranks
  /// Per-site times averaged over ranks.
  std::map<std::string, sim::SiteTime, std::less<>> sites;
};

struct BackendResult {
  std::string backend;
  std::string config_hash;
  perf::ScalingCurve curve;
  perf::StrongScalingReport strong;
  std::vector<double> ideal;
  std::vector<CellCounters> cells;  // parallel to curve.samples
  std::vector<time::StepReport> steps;
  std::vector<perf::WeakBucket> weak;
};

struct ScalingReport {
  std::string config_hash;
  std::string config_text;
  std::string profile;
  std::string window;  // e.g. "steps 31-50"
  std::uint64_t n = 0;
  int num_elements = 0;
  std::vector<BackendResult> backends;
};

/// A failed (backend, P) cell. P is 0 when the failure is shared by the whole sweep.
class ExperimentError : public std::runtime_error {
public:
  ExperimentError(const std::string& what, std::string backend, int p)
      : std::runtime_error(what), backend(std::move(backend)), p(p) {}
  std::string backend;
  int p = 0;
};

/// One flow simulation per backend with every P of the sweep attached as a
/// virtual-rank partition; the measured window follows the warmup steps.
ScalingReport run_scaling_experiment(const ExperimentConfig& config, const perf::MachineProfile& profile);

} // namespace semscale::report
