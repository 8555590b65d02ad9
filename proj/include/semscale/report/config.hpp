#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "semscale/sim/cluster.hpp"
#include "semscale/solvers/schwarz.hpp"

namespace semscale::report {

/// Everything a scaling sweep depends on. Read from sectioned key = value text:
///
///   [mesh]    elements, box, periodic, n_per_dir
///   [scheme]  flow, k, dt, reynolds, projection, warmup, window
///   [solver]  pressure_tolerance, velocity_tolerance, restart, max_iterations, coarse, local
///   [machine] profile, mode, seed, noise, noise_probability, noise_multiplier
///   [sweep]   ranks
struct ExperimentConfig {
  std::array<int, 3> elements{4, 4, 4};
  std::array<double, 3> box{6.283185307179586, 6.283185307179586, 6.283185307179586};
  std::array<bool, 3> periodic{true, true, true};
  int n_per_dir = 6;

  std::string flow = "taylor_green";
  int k = 2;
  double dt = 0.05;
  double reynolds = 100.0;
  int projection = 5;
  int warmup = 30;
  int window = 20;

  double pressure_tolerance = 1e-8;
  double velocity_tolerance = 1e-8;
  int restart = 30;
  int max_iterations = 500;
  std::vector<solvers::CoarseBackend> backends{solvers::CoarseBackend::Xxt};
  solvers::LocalSolver local = solvers::LocalSolver::FastDiagonalization;

  std::string profile = "mira";
  sim::TimingMode mode = sim::TimingMode::Modeled;
  std::uint64_t seed = 1;
  sim::NoiseSpec noise{};

  std::vector<int> ranks{1};

  [[nodiscard]] int num_elements() const { return elements[0] * elements[1] * elements[2]; }
  /// Throws InvalidArgument on out-of-range values (ranks outside 1..E, window < 1, ...).
  void validate() const;
};

/// Throws IoError on syntax errors, unknown sections or keys, and bad values.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);
/// Canonical text form; parse_config(write_config(c)) == c.
void write_config(std::ostream& os, const ExperimentConfig& config);
std::string config_text(const ExperimentConfig& config);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::string to_string(sim::TimingMode mode);
sim::TimingMode parse_mode(std::string_view name);

} // namespace semscale::report
