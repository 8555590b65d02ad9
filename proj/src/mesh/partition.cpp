#include "semscale/mesh/partition.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <tuple>

#include "semscale/error.hpp"

namespace semscale::mesh {

std::vector<std::vector<int>> Partition::elements_by_rank() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(num_ranks));
  for (int e = 0; e < num_elements(); ++e) out[static_cast<std::size_t>(rank_of_element[static_cast<std::size_t>(e)])].push_back(e);
  return out;
}

void Partition::validate() const {
  if (num_ranks < 1) throw InvalidArgument("Partition: num_ranks must be >= 1");
  std::vector<int> load(static_cast<std::size_t>(num_ranks), 0);
  for (int r : rank_of_element) {
    if (r < 0 || r >= num_ranks) throw InvalidArgument("Partition: rank out of range");
    ++load[static_cast<std::size_t>(r)];
  }
  for (int l : load)
    if (l == 0) throw InvalidArgument("Partition: every rank must own at least one element");
}

std::vector<int> balanced_loads(int num_elements, int num_ranks) {
  if (num_ranks < 1) throw InvalidArgument("balanced_loads: need at least one rank");
  if (num_ranks > num_elements)
    throw TooManyRanksError("more ranks than elements: at least one element per rank is required");
  const int q = num_elements / num_ranks;
  const int rem = num_elements % num_ranks;
  std::vector<int> loads(static_cast<std::size_t>(num_ranks), q);
  for (int r = 0; r < rem; ++r) ++loads[static_cast<std::size_t>(r)];
  return loads;
}

namespace {

/// Generic recursive splitter: `keys` orders a subset; the first n_left go to the lower ranks.
void split(const std::vector<int>& elements, int r0, int p, const std::vector<int>& loads,
           std::vector<int>& rank_of, const std::function<std::vector<std::pair<double, double>>(const std::vector<int>&)>& keys) {
  if (p == 1) {
    for (int e : elements) rank_of[static_cast<std::size_t>(e)] = r0;
    return;
  }
  const int p_left = (p + 1) / 2;
  const auto n_left = static_cast<std::size_t>(
      std::accumulate(loads.begin() + r0, loads.begin() + r0 + p_left, 0));

  const auto k = keys(elements);
  std::vector<std::size_t> order(elements.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(k[a].first, k[a].second, elements[a]) < std::tie(k[b].first, k[b].second, elements[b]);
  });

  std::vector<int> left, right;
  for (std::size_t i = 0; i < order.size(); ++i) (i < n_left ? left : right).push_back(elements[order[i]]);
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  split(left, r0, p_left, loads, rank_of, keys);
  split(right, r0 + p_left, p - p_left, loads, rank_of, keys);
}

void check_ranks(int num_elements, int num_ranks) {
  if (num_ranks < 1) throw InvalidArgument("partition: num_ranks must be >= 1");
  if (num_ranks > num_elements)
    throw TooManyRanksError("partition: P > E; at least one element per process is required");
}

} // namespace

Partition recursive_spectral_bisection(const ElementGraph& graph, int num_ranks, const FiedlerOptions& options) {
  const int ne = graph.num_vertices();
  check_ranks(ne, num_ranks);
  Partition part;
  part.num_ranks = num_ranks;
  part.rank_of_element.assign(static_cast<std::size_t>(ne), 0);
  std::vector<int> all(static_cast<std::size_t>(ne));
  std::iota(all.begin(), all.end(), 0);
  const auto loads = balanced_loads(ne, num_ranks);

  auto keys = [&](const std::vector<int>& elements) {
    const ElementGraph sub = graph.induced(elements);
    int ncomp = 0;
    const auto comp = sub.components(&ncomp);
    std::vector<std::pair<double, double>> key(elements.size());
    for (int c = 0; c < ncomp; ++c) {
      std::vector<int> members;
      for (std::size_t i = 0; i < elements.size(); ++i)
        if (comp[i] == c) members.push_back(static_cast<int>(i));
      std::vector<double> value(members.size(), 0.0);
      if (members.size() >= 2) {
        const ElementGraph cg = ncomp == 1 ? sub : sub.induced(members);
        value = fiedler_vector(cg, options).vector;
      }
      for (std::size_t m = 0; m < members.size(); ++m)
        key[static_cast<std::size_t>(members[m])] = {static_cast<double>(c), value[m]};
    }
    return key;
  };
  split(all, 0, num_ranks, loads, part.rank_of_element, keys);
  return part;
}

Partition recursive_spectral_bisection(const HexMesh& mesh, int num_ranks) {
  check_ranks(mesh.num_elements(), num_ranks);
  return recursive_spectral_bisection(element_adjacency(mesh), num_ranks);
}

Partition coordinate_bisection(const HexMesh& mesh, int num_ranks) {
  const int ne = mesh.num_elements();
  check_ranks(ne, num_ranks);
  Partition part;
  part.num_ranks = num_ranks;
  part.rank_of_element.assign(static_cast<std::size_t>(ne), 0);
  std::vector<int> all(static_cast<std::size_t>(ne));
  std::iota(all.begin(), all.end(), 0);

  auto keys = [&](const std::vector<int>& elements) {
    std::array<double, 3> lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (int e : elements) {
      const auto o = mesh.element_origin(e);
      for (std::size_t d = 0; d < 3; ++d) {
        lo[d] = std::min(lo[d], o[d]);
        hi[d] = std::max(hi[d], o[d] + mesh.element_size(static_cast<int>(d)));
      }
    }
    std::size_t axis = 0;
    for (std::size_t d = 1; d < 3; ++d)
      if (hi[d] - lo[d] > hi[axis] - lo[axis]) axis = d;
    std::vector<std::pair<double, double>> key(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i) key[i] = {mesh.element_origin(elements[i])[axis], 0.0};
    return key;
  };
  split(all, 0, num_ranks, balanced_loads(ne, num_ranks), part.rank_of_element, keys);
  return part;
}

Partition block_partition(int num_elements, int num_ranks) {
  check_ranks(num_elements, num_ranks);
  const auto loads = balanced_loads(num_elements, num_ranks);
  Partition part;
  part.num_ranks = num_ranks;
  part.rank_of_element.reserve(static_cast<std::size_t>(num_elements));
  for (int r = 0; r < num_ranks; ++r)
    part.rank_of_element.insert(part.rank_of_element.end(), static_cast<std::size_t>(loads[static_cast<std::size_t>(r)]), r);
  return part;
}

std::vector<int> rank_loads(const Partition& partition) {
  std::vector<int> loads(static_cast<std::size_t>(partition.num_ranks), 0);
  for (int r : partition.rank_of_element) ++loads[static_cast<std::size_t>(r)];
  return loads;
}

std::map<int, int> partition_histogram(const Partition& partition) {
  std::map<int, int> hist;
  for (int l : rank_loads(partition)) ++hist[l];
  return hist;
}

std::size_t edge_cut(const ElementGraph& graph, const Partition& partition) {
  std::size_t cut = 0;
  for (int v = 0; v < graph.num_vertices(); ++v)
    for (int nb : graph.adjacency[static_cast<std::size_t>(v)])
      if (nb > v && partition.rank_of_element[static_cast<std::size_t>(v)] !=
                        partition.rank_of_element[static_cast<std::size_t>(nb)])
        ++cut;
  return cut;
}

void write_partition(std::ostream& os, const Partition& partition) {
  os << partition.num_elements() << ' ' << partition.num_ranks << '\n';
  for (int e = 0; e < partition.num_elements(); ++e)
    os << e << ' ' << partition.rank_of_element[static_cast<std::size_t>(e)] << '\n';
}

Partition read_partition(std::istream& is) {
  long long ne = 0, np = 0;
  if (!(is >> ne >> np) || ne < 0 || np < 1) throw IoError("read_partition: bad header");
  Partition part;
  part.num_ranks = static_cast<int>(np);
  part.rank_of_element.assign(static_cast<std::size_t>(ne), -1);
  for (long long i = 0; i < ne; ++i) {
    long long e = 0, r = 0;
    if (!(is >> e >> r)) throw IoError("read_partition: truncated body");
    if (e < 0 || e >= ne) throw IoError("read_partition: element id out of range");
    part.rank_of_element[static_cast<std::size_t>(e)] = static_cast<int>(r);
  }
  try {
    part.validate();
  } catch (const InvalidArgument& ex) {
    throw IoError(std::string("read_partition: ") + ex.what());
  }
  return part;
}

} // namespace semscale::mesh
