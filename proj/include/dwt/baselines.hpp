#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dwt/dataset.hpp"
#include "dwt/dwtest.hpp"

namespace dwt {

// Nearest-neighbor coincidence count: over all points, how many of the k
// nearest neighbors (ambient Euclidean metric, ties by index) carry the same
// label.
double knn_statistic(const Matrix& pts, const std::vector<int>& labels, int k);

// Energy distance between the two groups (ambient Euclidean metric).
double energy_statistic(const Matrix& pts, const std::vector<int>& labels);

// Gaussian-kernel bandwidth s * n^(-1/(d + 2*beta)) with s^2 the summed
// per-coordinate variance of the pooled sample.
double mmd_bandwidth(double s2, int n, int d, double beta = 1.0);

// Biased (V-statistic) squared maximum mean discrepancy with the Gaussian
// kernel exp(-|x-y|^2 / (2 h^2)).
double mmd_statistic(const Matrix& pts, const std::vector<int>& labels, int d,
                     double beta = 1.0);

enum class Method { DW, KNN, Energy, MMD };

std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

struct BaselineOptions {
  std::optional<int> d;  // intrinsic dimension; estimated when absent
  std::optional<int> k;  // neighbor count for KNN; default d+1
  double beta = 1.0;
  int B = 200;
  std::uint64_t seed = 1;
  int threads = 0;
};

// Permutation test for KNN/Energy/MMD with pairwise quantities cached across
// label permutations. Uses the same shuffling scheme as permutation_test.
TestResult permutation_wrap(Method method, const Matrix& pts,
                            const std::vector<int>& labels,
                            const BaselineOptions& opts);

struct ScenarioSpec {
  std::string name;       // gaussian-{null,location,direction} or image-*
  int d = 20;             // ambient dimension (gaussian scenarios)
  int n1 = 50, n0 = 50;
  double radius = -1.0;   // location shift radius; <0 = default rule
  double scale = kDefaultDirectionScale;
  std::optional<std::string> template_csv;  // image scenarios
};

bool is_image_scenario(const ScenarioSpec& spec);

// Deterministic draw of one dataset for the scenario.
LabeledSample generate_scenario(const ScenarioSpec& spec, std::uint64_t seed);

struct BenchmarkOptions {
  std::optional<int> d;   // fixed embedding/intrinsic dimension for all
                          // methods; estimated per replicate when absent
  std::optional<int> k;
  double eta = kDefaultEta;
  double beta = 1.0;
  int B = 200;
  std::uint64_t seed = 1;
  int threads = 0;
  std::vector<double> alphas = {0.01, 0.05, 0.10};
};

struct BenchmarkReport {
  ScenarioSpec scenario;
  std::vector<Method> methods;
  int replicates = 0;
  std::uint64_t seed = 0;
  Matrix pvalues;     // replicates x methods
  std::vector<double> alphas;
  Matrix rejections;  // methods x alphas
};

// Monte-Carlo power/size study: R datasets, each tested by every method with
// independent permutation draws. Replicates are independent substreams, so
// results do not depend on the thread count.
BenchmarkReport run_benchmark(const ScenarioSpec& spec,
                              const std::vector<Method>& methods, int R,
                              const BenchmarkOptions& opts);

void write_benchmark_csv(const std::string& prefix,
                         const BenchmarkReport& report,
                         const std::vector<std::string>& comments);

}  // namespace dwt
