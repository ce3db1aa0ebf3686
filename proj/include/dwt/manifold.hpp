#pragma once

#include <optional>
#include <vector>

#include "dwt/common.hpp"

namespace dwt {

struct GraphEdge {
  int u = 0, v = 0;  // endpoints, u < v
  double w = 0.0;    // Euclidean length
};

// Symmetric kNN graph united with a Euclidean MST, so it is connected by
// construction.
struct GeodesicGraph {
  int n = 0;
  std::vector<GraphEdge> edges;
};

using GeodesicDistances = Matrix;  // n x n shortest-path lengths

// Low-dimensional coordinates recovered from geodesic distances.
struct EmbeddedCloud {
  Matrix coords;  // n x dim, column means zero
  int dim = 0;
};

Matrix pairwise_distances(const Matrix& pts);

GeodesicGraph build_geodesic_graph(const Matrix& pts, int k);

// All-pairs shortest paths over the graph (Dijkstra from every source).
GeodesicDistances geodesic_distances(const GeodesicGraph& graph,
                                     int threads = 0);

// Two-nearest-neighbor maximum-likelihood estimate of the intrinsic
// dimension, rounded and clamped to [1, min(D, n-2)].
int estimate_intrinsic_dimension(const Matrix& pts);

// Classical (Torgerson) multidimensional scaling of a distance matrix onto d
// coordinates. Negative eigenvalues are clamped to zero; if fewer than d
// positive eigenvalues exist the remaining coordinates are zero-filled and a
// warning is printed. Column signs follow the convention that the
// largest-magnitude entry of each column is positive.
EmbeddedCloud classical_mds(const Matrix& dist, int d);

struct EmbedOptions {
  std::optional<int> d;  // default: estimate_intrinsic_dimension
  std::optional<int> k;  // default: max(d+1, ceil(log2 n))
  int threads = 0;
};

struct EmbedResult {
  EmbeddedCloud cloud;
  GeodesicGraph graph;
  GeodesicDistances distances;
  int d_used = 0;
  bool d_estimated = false;
  int k_used = 0;
};

// Full pipeline: graph -> geodesic distances -> MDS.
EmbedResult embed(const Matrix& pts, const EmbedOptions& opts = {});

}  // namespace dwt
