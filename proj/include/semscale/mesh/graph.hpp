#pragma once

#include <span>
#include <vector>

#include "semscale/mesh/hex_mesh.hpp"

namespace semscale::mesh {

/// Undirected element graph; an edge means two elements share a full face.
/// Adjacency lists are sorted, duplicate-free and contain no self-loops.
struct ElementGraph {
  std::vector<std::vector<int>> adjacency;

  [[nodiscard]] int num_vertices() const { return static_cast<int>(adjacency.size()); }
  [[nodiscard]] std::size_t num_edges() const;
  /// Graph induced on `vertices` (given in ascending order); vertex i of the
  /// result corresponds to vertices[i].
  [[nodiscard]] ElementGraph induced(std::span<const int> vertices) const;
  /// Connected-component label per vertex, components numbered by smallest member.
  [[nodiscard]] std::vector<int> components(int* count = nullptr) const;
};

/// Face adjacency (periodic wraparound included).
ElementGraph element_adjacency(const HexMesh& mesh);

struct FiedlerOptions {
  double tolerance = 1e-8;
  int max_iterations = 500;
  /// Graphs below this size use a dense eigensolve.
  int dense_threshold = 200;
};

struct FiedlerResult {
  std::vector<double> vector;
  double lambda2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Unit eigenvector of the graph Laplacian for its second-smallest eigenvalue,
/// orthogonal to the constant vector.
///
/// When lambda_2 is repeated (cubes, squares) the returned vector is the
/// projection of the index ramp onto the eigenspace, which makes the result a
/// deterministic function of the vertex numbering. The sign is chosen so the
/// vector correlates non-negatively with that ramp.
///
/// Throws NotConnectedError for disconnected graphs and InvalidArgument for
/// fewer than two vertices.
FiedlerResult fiedler_vector(const ElementGraph& graph, const FiedlerOptions& options = {});

} // namespace semscale::mesh
