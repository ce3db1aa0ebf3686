#include "dwt/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <queue>
#include <vector>

#include "dwt/parallel.hpp"

namespace dwt {

Matrix pairwise_distances(const Matrix& pts) {
  Vector sq = pts.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * pts * pts.transpose());
  d2.colwise() += sq;
  d2.rowwise() += sq.transpose();
  Matrix dist = d2.cwiseMax(0.0).cwiseSqrt();
  dist.diagonal().setZero();
  // mirror the upper triangle: the blocked matrix product is not bitwise
  // symmetric, and downstream ties must not depend on orientation
  for (int i = 0; i < dist.rows(); ++i)
    for (int j = 0; j < i; ++j) dist(i, j) = dist(j, i);
  return dist;
}

namespace {

// k smallest off-diagonal entries of row i, ties broken by index.
std::vector<int> knn_row(const Matrix& dist, int i, int k) {
  const int n = static_cast<int>(dist.rows());
  std::vector<std::pair<double, int>> order;
  order.reserve(n - 1);
  for (int j = 0; j < n; ++j)
    if (j != i) order.emplace_back(dist(i, j), j);
  const int kk = std::min<int>(k, static_cast<int>(order.size()));
  std::partial_sort(order.begin(), order.begin() + kk, order.end());
  std::vector<int> out(kk);
  for (int t = 0; t < kk; ++t) out[t] = order[t].second;
  return out;
}

// Dense-graph Prim; returns the n-1 tree edges.
std::vector<GraphEdge> mst_edges(const Matrix& dist) {
  const int n = static_cast<int>(dist.rows());
  std::vector<char> in_tree(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<GraphEdge> edges;
  edges.reserve(n - 1);
  best[0] = 0.0;
  for (int step = 0; step < n; ++step) {
    int u = -1;
    double bu = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      if (!in_tree[i] && best[i] < bu) {
        bu = best[i];
        u = i;
      }
    in_tree[u] = 1;
    if (parent[u] >= 0)
      edges.push_back({std::min(u, parent[u]), std::max(u, parent[u]), dist(u, parent[u])});
    for (int j = 0; j < n; ++j)
      if (!in_tree[j] && dist(u, j) < best[j]) {
        best[j] = dist(u, j);
        parent[j] = u;
      }
  }
  return edges;
}

}  // namespace

GeodesicGraph build_geodesic_graph(const Matrix& pts, int k) {
  const int n = static_cast<int>(pts.rows());
  if (n < 2) throw data_error("geodesic graph needs at least 2 points");
  if (k < 1) throw data_error("neighbor count must be positive");
  const Matrix dist = pairwise_distances(pts);

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j : knn_row(dist, i, k))
      pairs.emplace_back(std::min(i, j), std::max(i, j));
  for (const auto& e : mst_edges(dist)) pairs.emplace_back(e.u, e.v);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  GeodesicGraph g;
  g.n = n;
  g.edges.reserve(pairs.size());
  for (const auto& [u, v] : pairs) g.edges.push_back({u, v, dist(u, v)});
  return g;
}

GeodesicDistances geodesic_distances(const GeodesicGraph& graph, int threads) {
  const int n = graph.n;
  // CSR adjacency
  std::vector<int> deg(n, 0);
  for (const auto& e : graph.edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  std::vector<int> off(n + 1, 0);
  for (int i = 0; i < n; ++i) off[i + 1] = off[i] + deg[i];
  std::vector<int> adj(off[n]);
  std::vector<double> len(off[n]);
  std::vector<int> cur(off.begin(), off.end() - 1);
  for (const auto& e : graph.edges) {
    adj[cur[e.u]] = e.v;
    len[cur[e.u]++] = e.w;
    adj[cur[e.v]] = e.u;
    len[cur[e.v]++] = e.w;
  }

  Matrix out(n, n);
  parallel_for(
      n,
      [&](std::int64_t src) {
        std::vector<double> d(n, std::numeric_limits<double>::infinity());
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        d[src] = 0.0;
        heap.emplace(0.0, static_cast<int>(src));
        while (!heap.empty()) {
          auto [du, u] = heap.top();
          heap.pop();
          if (du > d[u]) continue;
          for (int t = off[u]; t < off[u + 1]; ++t) {
            const double nd = du + len[t];
            if (nd < d[adj[t]]) {
              d[adj[t]] = nd;
              heap.emplace(nd, adj[t]);
            }
          }
        }
        for (int j = 0; j < n; ++j) {
          if (!std::isfinite(d[j]))
            throw numeric_error("geodesic graph is disconnected");
          out(src, j) = d[j];
        }
      },
      threads);
  return out;
}

int estimate_intrinsic_dimension(const Matrix& pts) {
  const int n = static_cast<int>(pts.rows());
  const int D = static_cast<int>(pts.cols());
  if (n < 3) throw data_error("dimension estimate needs at least 3 points");
  const Matrix dist = pairwise_distances(pts);
  double log_sum = 0.0;
  int used = 0;
  for (int i = 0; i < n; ++i) {
    double r1 = std::numeric_limits<double>::infinity();
    double r2 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = dist(i, j);
      if (d < r1) {
        r2 = r1;
        r1 = d;
      } else if (d < r2) {
        r2 = d;
      }
    }
    if (r1 <= 0.0) continue;  // duplicated point: ratio carries no information
    log_sum += std::log(r2 / r1);
    ++used;
  }
  if (used == 0 || log_sum <= 0.0)
    throw numeric_error("degenerate neighbor ratios");
  const int est = static_cast<int>(std::lround(used / log_sum));
  return std::clamp(est, 1, std::min(D, n - 2));
}

EmbeddedCloud classical_mds(const Matrix& dist, int d) {
  const int n = static_cast<int>(dist.rows());
  if (dist.cols() != n) throw data_error("distance matrix must be square");
  if (d < 1 || d > n - 1) throw data_error("mds dimension out of range");

  // double-centered squared distances
  Matrix d2 = dist.array().square();
  Vector row_mean = d2.rowwise().mean();
  const double grand = row_mean.mean();
  Matrix b = -0.5 * (d2.colwise() - row_mean);
  b.rowwise() += 0.5 * row_mean.transpose();
  b.array() -= 0.5 * grand;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (b + b.transpose()));
  if (eig.info() != Eigen::Success)
    throw numeric_error("mds eigendecomposition failed");
  const Vector& ev = eig.eigenvalues();  // ascending
  const double scale = std::max(std::abs(ev[0]), std::abs(ev[n - 1]));

  EmbeddedCloud cloud;
  cloud.dim = d;
  cloud.coords = Matrix::Zero(n, d);
  int positive = 0;
  for (int j = 0; j < d; ++j) {
    const double lambda = ev[n - 1 - j];
    if (lambda > 1e-10 * scale) {
      cloud.coords.col(j) = eig.eigenvectors().col(n - 1 - j) * std::sqrt(lambda);
      ++positive;
    }
  }
  if (positive < d)
    std::cerr << "warning: only " << positive << " positive mds directions; "
              << d - positive << " coordinate(s) zero-filled\n";

  // deterministic signs: largest-magnitude entry of each column positive
  for (int j = 0; j < d; ++j) {
    int arg = 0;
    cloud.coords.col(j).cwiseAbs().maxCoeff(&arg);
    if (cloud.coords(arg, j) < 0) cloud.coords.col(j) = -cloud.coords.col(j);
  }
  // kill numerical drift of the centering
  cloud.coords.rowwise() -= cloud.coords.colwise().mean().eval();
  return cloud;
}

EmbedResult embed(const Matrix& pts, const EmbedOptions& opts) {
  const int n = static_cast<int>(pts.rows());
  EmbedResult result;
  result.d_estimated = !opts.d.has_value();
  result.d_used = opts.d ? *opts.d : estimate_intrinsic_dimension(pts);
  if (result.d_used < 1) throw data_error("dimension must be positive");
  if (n < result.d_used + 2)
    throw data_error("sample too small for dimension " +
                     std::to_string(result.d_used));
  const int log_k = static_cast<int>(std::ceil(std::log2(std::max(2, n))));
  result.k_used = opts.k ? *opts.k : std::max(result.d_used + 1, log_k);
  result.k_used = std::min(result.k_used, n - 1);
  result.graph = build_geodesic_graph(pts, result.k_used);
  result.distances = geodesic_distances(result.graph, opts.threads);
  result.cloud = classical_mds(result.distances, result.d_used);
  return result;
}

}  // namespace dwt
