#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dwt/dataset.hpp"
#include "dwt/delaunay.hpp"
#include "dwt/rng.hpp"

namespace dwt {

// T = sum_i sum_j gamma_ij * [labels_i == labels_j].
double statistic(const WeightMatrix& weights, const std::vector<int>& labels);

// Exact conditional null moments of T/n under label exchangeability.
struct NullMoments {
  double mean = 0.0;
  double variance = 0.0;
  double v0 = 0.0, v1 = 0.0, v2 = 0.0;  // pair/triple/quadruple components
};

NullMoments null_moments(const WeightMatrix& weights, int n1, int n0);

struct TestResult {
  std::string method;
  double statistic = 0.0;
  double p_value = 1.0;
  int B = 0;                  // permutation replicates (0 for the z test)
  std::uint64_t seed = 0;
  int d_used = 0;
  bool d_estimated = false;
  int k_used = 0;
  double eta = 0.0;
  int n = 0, n1 = 0, n0 = 0;
  double wall_seconds = 0.0;
  std::vector<double> permuted;  // permuted statistics, when applicable
};

// Uniform re-arrangement of the label vector (Fisher-Yates); the permutation
// engine applies exactly this to substream fork(seed, b) for replicate b.
std::vector<int> shuffle_labels(std::vector<int> labels, Rng& rng);

// Upper-tail permutation p-value (#{T_obs <= T_b} + 1) / (B + 1), reusing the
// weight matrix across label permutations.
TestResult permutation_test(const WeightMatrix& weights,
                            const std::vector<int>& labels, int B,
                            std::uint64_t seed, int threads = 0);

// Gaussian-limit test: compares (T/n - mean)/sqrt(variance) to N(0,1),
// upper tail.
TestResult z_test(const WeightMatrix& weights, const std::vector<int>& labels);

struct DwOptions {
  std::optional<int> d;
  std::optional<int> k;
  double eta = kDefaultEta;
  int B = 200;
  std::uint64_t seed = 1;
  int threads = 0;
  bool use_z = false;  // z test instead of permutations
};

// Full pipeline on raw data: embed -> weights -> test.
TestResult run_dw_test(const LabeledSample& sample, const DwOptions& opts = {});

}  // namespace dwt
