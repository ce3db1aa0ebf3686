#pragma once

#include <utility>
#include <vector>

#include "dwt/common.hpp"
#include "dwt/manifold.hpp"

namespace dwt {

// Embedded points lifted onto a sphere in R^(d+1) by the inverse
// stereographic map. Row 0 is the reference pole; row i+1 is point i.
struct SphereCloud {
  Matrix lifted;      // (n+1) x (d+1)
  double eta = 10.0;  // sphere inflation factor
  double r_max = 0.0; // largest embedded point norm
  int dim = 0;        // d
};

inline constexpr double kDefaultEta = 10.0;

// Maps z in R^d onto the sphere of diameter w touching the origin:
// z -> (w^2 z, w |z|^2) / (w^2 + |z|^2). The origin goes to the south pole
// and |z| -> inf approaches the north pole (0, w).
Vector inverse_stereographic(const Vector& z, double w);

SphereCloud lift_cloud(const EmbeddedCloud& cloud, double eta = kDefaultEta);

// d+1 point indices (sorted, referring to the embedded cloud) whose simplex
// is the Delaunay cell covering point i's hull projection once i itself is
// removed from the cloud.
struct SimplexHandle {
  std::vector<int> vertices;
};

SimplexHandle locate_simplex(const SphereCloud& sphere, int i);

// One row of the weight matrix: barycentric-style weights of point i's hull
// projection within its located simplex. Entries are (index, weight) pairs
// sorted by index; weights are nonnegative and sum to one.
struct WeightRow {
  std::vector<std::pair<int, double>> entries;
  Vector projection;  // the point the weights reconstruct
};

WeightRow weight_row(const EmbeddedCloud& cloud, int i,
                     const SimplexHandle& simplex);

struct WeightMatrix {
  int n = 0;
  int dim = 0;
  double eta = kDefaultEta;
  std::vector<WeightRow> rows;
};

WeightMatrix weight_matrix(const EmbeddedCloud& cloud,
                           double eta = kDefaultEta, int threads = 0);

// True when no cloud point (other than the simplex vertices and `exclude`)
// lies strictly inside the simplex circumball, with relative slack 1e-8.
bool verify_empty_ball(const EmbeddedCloud& cloud, const SimplexHandle& simplex,
                       int exclude = -1);

// Reference O(n^(d+2)) Delaunay triangulation by circumball checks. Guarded
// against clouds where C(n, d+1) exceeds 1e6 subsets.
std::vector<SimplexHandle> brute_force_delaunay(const EmbeddedCloud& cloud);

// min ||V w - z|| over the probability simplex (w >= 0, sum w = 1), where V
// is d x m with vertices as columns. Exact active-set solve.
Vector simplex_weights(const Matrix& V, const Vector& z);

}  // namespace dwt
