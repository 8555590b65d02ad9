#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "semscale/mesh/graph.hpp"
#include "semscale/mesh/hex_mesh.hpp"

namespace semscale::mesh {

/// Element-to-rank map. Every rank in [0, num_ranks) owns at least one element.
struct Partition {
  int num_ranks = 1;
  std::vector<int> rank_of_element;

  [[nodiscard]] int num_elements() const { return static_cast<int>(rank_of_element.size()); }
  /// Elements owned by each rank, ascending.
  [[nodiscard]] std::vector<std::vector<int>> elements_by_rank() const;
  /// Throws InvalidArgument if a value is out of range or a rank is empty.
  void validate() const;
};

/// Per-rank target loads: the first E mod P ranks carry one extra element.
std::vector<int> balanced_loads(int num_elements, int num_ranks);

/// Recursive median splits of the Fiedler vector. Ranks are split ceil(P/2) |
/// floor(P/2) at each level; the smaller Fiedler values go to the lower ranks.
/// Throws TooManyRanksError when P > E and InvalidArgument when P < 1.
Partition recursive_spectral_bisection(const ElementGraph& graph, int num_ranks, const FiedlerOptions& options = {});
Partition recursive_spectral_bisection(const HexMesh& mesh, int num_ranks);

/// Recursive bisection along the longest axis of each element subset's bounding box.
Partition coordinate_bisection(const HexMesh& mesh, int num_ranks);

/// Contiguous blocks of element indices with the balanced_loads schedule.
Partition block_partition(int num_elements, int num_ranks);

/// Elements per rank.
std::vector<int> rank_loads(const Partition& partition);

/// load -> number of ranks carrying that load.
std::map<int, int> partition_histogram(const Partition& partition);

std::size_t edge_cut(const ElementGraph& graph, const Partition& partition);

/// Header "E P", then one "element-id rank" pair per line.
void write_partition(std::ostream& os, const Partition& partition);
/// Throws IoError on malformed input.
Partition read_partition(std::istream& is);

} // namespace semscale::mesh
