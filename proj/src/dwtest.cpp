#include "dwt/dwtest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "dwt/manifold.hpp"
#include "dwt/parallel.hpp"

namespace dwt {

namespace {

void check_labels(const WeightMatrix& weights, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != weights.n)
    throw data_error("label vector length does not match the weight matrix");
  int n1 = 0, n0 = 0;
  for (int v : labels) {
    if (v == 1)
      ++n1;
    else if (v == 0)
      ++n0;
    else
      throw data_error("labels must be 0 or 1");
  }
  if (n1 == 0 || n0 == 0) throw data_error("both groups must be present");
}

}  // namespace

double statistic(const WeightMatrix& weights, const std::vector<int>& labels) {
  check_labels(weights, labels);
  double t = 0.0;
  for (int i = 0; i < weights.n; ++i) {
    const int li = labels[i];
    for (const auto& [j, g] : weights.rows[i].entries)
      if (labels[j] == li) t += g;
  }
  return t;
}

std::vector<int> shuffle_labels(std::vector<int> labels, Rng& rng) {
  for (std::size_t i = labels.size() - 1; i > 0; --i) {
    const std::size_t j = rng.below(i + 1);
    std::swap(labels[i], labels[j]);
  }
  return labels;
}

NullMoments null_moments(const WeightMatrix& weights, int n1, int n0) {
  const int n = weights.n;
  if (n1 + n0 != n) throw data_error("group sizes must sum to the sample size");
  if (n < 4) throw data_error("null moments need at least 4 points");
  if (n1 < 1 || n0 < 1) throw data_error("both groups must be present");

  // symmetrized weights gamma_ij + gamma_ji, merged per row
  std::vector<std::vector<std::pair<int, double>>> sym(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, g] : weights.rows[i].entries) {
      sym[i].emplace_back(j, g);
      sym[j].emplace_back(i, g);
    }
  }
  double s1 = 0.0, s2 = 0.0, sum_r2 = 0.0;
  for (int i = 0; i < n; ++i) {
    auto& row = sym[i];
    std::sort(row.begin(), row.end());
    double r = 0.0;
    std::size_t w = 0;
    for (std::size_t a = 0; a < row.size();) {
      double g = row[a].second;
      std::size_t b = a + 1;
      while (b < row.size() && row[b].first == row[a].first) g += row[b++].second;
      row[w++] = {row[a].first, g};
      r += g;
      s2 += g * g;
      a = b;
    }
    row.resize(w);
    s1 += r;
    sum_r2 += r * r;
  }
  s1 /= 2.0;  // each edge seen from both rows
  s2 /= 2.0;

  // edge-pair sums: sharing one endpoint (paths) and sharing none
  const double paths = (sum_r2 - 2.0 * s2) / 2.0;
  const double disjoint = (s1 * s1 - s2) / 2.0 - paths;

  const double nn = n;
  NullMoments mom;
  mom.v2 = s2 / (nn * (nn - 1) / 2.0);
  mom.v1 = paths / (nn * (nn - 1) * (nn - 2) / 6.0);
  mom.v0 = disjoint / (nn * (nn - 1) * (nn - 2) * (nn - 3) / 24.0);
  mom.mean = (double(n1) * (n1 - 1) + double(n0) * (n0 - 1)) / (nn * (nn - 1));
  const double var = double(n1) * (n1 - 1) * n0 * (n0 - 1) / (3.0 * nn * nn) * mom.v0 +
                     double(n1) * n0 * (nn - 2) / (3.0 * nn * nn) * mom.v1 +
                     double(n1) * n0 / (nn * nn) * mom.v2 -
                     4.0 * double(n1) * n1 * n0 * n0 / ((nn - 1) * (nn - 1) * nn * nn);
  mom.variance = std::max(0.0, var);
  return mom;
}

TestResult permutation_test(const WeightMatrix& weights,
                            const std::vector<int>& labels, int B,
                            std::uint64_t seed, int threads) {
  if (B < 1) throw data_error("permutation count must be positive");
  check_labels(weights, labels);
  const double t_obs = statistic(weights, labels);

  std::vector<double> permuted(B);
  parallel_for(
      B,
      [&](std::int64_t b) {
        Rng rng(Rng::fork_seed(seed, static_cast<std::uint64_t>(b)));
        const std::vector<int> relabeled = shuffle_labels(labels, rng);
        permuted[b] = statistic(weights, relabeled);
      },
      threads);

  int geq = 0;
  for (double t : permuted)
    if (t_obs <= t) ++geq;

  TestResult result;
  result.method = "dw";
  result.statistic = t_obs;
  result.p_value = double(geq + 1) / double(B + 1);
  result.B = B;
  result.seed = seed;
  result.n = weights.n;
  result.n1 = static_cast<int>(std::count(labels.begin(), labels.end(), 1));
  result.n0 = result.n - result.n1;
  result.eta = weights.eta;
  result.d_used = weights.dim;
  result.permuted = std::move(permuted);
  return result;
}

TestResult z_test(const WeightMatrix& weights, const std::vector<int>& labels) {
  check_labels(weights, labels);
  const int n1 = static_cast<int>(std::count(labels.begin(), labels.end(), 1));
  const NullMoments mom = null_moments(weights, n1, weights.n - n1);
  if (mom.variance <= 0.0)
    throw numeric_error("null variance is zero; z test undefined");
  const double t = statistic(weights, labels) / weights.n;
  const double z = (t - mom.mean) / std::sqrt(mom.variance);

  TestResult result;
  result.method = "dw-z";
  result.statistic = t * weights.n;
  result.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
  result.n = weights.n;
  result.n1 = n1;
  result.n0 = result.n - n1;
  result.eta = weights.eta;
  result.d_used = weights.dim;
  return result;
}

TestResult run_dw_test(const LabeledSample& sample, const DwOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  EmbedOptions eopts;
  eopts.d = opts.d;
  eopts.k = opts.k;
  eopts.threads = opts.threads;
  const EmbedResult emb = embed(sample.points, eopts);
  const WeightMatrix wm = weight_matrix(emb.cloud, opts.eta, opts.threads);

  TestResult result = opts.use_z
                          ? z_test(wm, sample.labels)
                          : permutation_test(wm, sample.labels, opts.B,
                                             opts.seed, opts.threads);
  result.seed = opts.seed;
  result.d_used = emb.d_used;
  result.d_estimated = emb.d_estimated;
  result.k_used = emb.k_used;
  result.eta = opts.eta;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace dwt
