#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "semscale/mesh/hex_mesh.hpp"
#include "semscale/mesh/numbering.hpp"
#include "semscale/mesh/partition.hpp"
#include "semscale/sim/comm_model.hpp"
#include "semscale/sim/instrumentation.hpp"

namespace semscale::sim {

/// Points shared with one peer, ascending global index.
struct ExchangeRecord {
  int peer = 0;
  std::vector<int> points;
};

/// Direct-stiffness exchange pattern for one partition.
struct GatherScatterSchedule {
  int num_ranks = 0;
  int num_global = 0;
  /// Per rank, records sorted by peer.
  std::vector<std::vector<ExchangeRecord>> exchanges;
  /// Per rank, the ascending list of global points it touches.
  std::vector<std::vector<int>> rank_points;
  /// Per rank, for each of its local points (its elements ascending, then
  /// element-major), the slot in rank_points.
  std::vector<std::vector<int>> local_slot;
  std::vector<std::vector<int>> rank_elements;
  /// Number of ranks touching each global point.
  std::vector<int> rank_multiplicity;
  /// Lowest rank touching each global point; that rank counts it in reductions.
  std::vector<int> owner;

  [[nodiscard]] std::size_t total_messages() const;
  [[nodiscard]] std::size_t total_words() const;
  /// Global points owned by each rank.
  [[nodiscard]] std::vector<int> owned_counts() const;
  /// Throws InvalidArgument if the exchange records are not symmetric.
  void validate() const;
};

/// Throws InvalidArgument when the partition does not match the mesh.
GatherScatterSchedule build_gather_scatter(const mesh::HexMesh& mesh, const mesh::Partition& partition, int n_per_dir);
GatherScatterSchedule build_gather_scatter(const mesh::GllNumbering& numbering, const mesh::Partition& partition);

/// Direct-stiffness summation of an element-major local field (E n^3 values).
///
/// Each rank sums its own element copies in ascending element order, sends the
/// partial sums of shared points to every peer, and adds the partials of all
/// sharing ranks in ascending rank order. Every message is logged and its
/// model time charged to the sender's communication clock.
/// Throws InvalidArgument on size mismatch.
void dssum(std::span<double> field, const mesh::GllNumbering& numbering, const GatherScatterSchedule& schedule,
           MessageLog& log, std::span<RankClock> clocks, const CommModel& model, Rng* rng = nullptr,
           std::string_view site = "dssum");

} // namespace semscale::sim
