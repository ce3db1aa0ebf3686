#include "dwt/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "dwt/csv.hpp"
#include "dwt/manifold.hpp"
#include "dwt/parallel.hpp"

namespace dwt {

namespace {

void check_two_groups(const std::vector<int>& labels) {
  const int n1 = static_cast<int>(std::count(labels.begin(), labels.end(), 1));
  if (n1 == 0 || n1 == static_cast<int>(labels.size()))
    throw data_error("both groups must be present");
}

// index matrix of the k nearest neighbors per point, ties broken by index
std::vector<std::vector<int>> neighbor_lists(const Matrix& dist, int k) {
  const int n = static_cast<int>(dist.rows());
  std::vector<std::vector<int>> nn(n);
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) order.emplace_back(dist(i, j), j);
    std::partial_sort(order.begin(), order.begin() + k, order.end());
    nn[i].resize(k);
    for (int t = 0; t < k; ++t) nn[i][t] = order[t].second;
  }
  return nn;
}

double knn_count(const std::vector<std::vector<int>>& nn,
                 const std::vector<int>& labels) {
  double c = 0.0;
  for (std::size_t i = 0; i < nn.size(); ++i)
    for (int j : nn[i])
      if (labels[i] == labels[j]) c += 1.0;
  return c;
}

double energy_from_dist(const Matrix& dist, const std::vector<int>& labels) {
  const int n = static_cast<int>(dist.rows());
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  int n1 = 0;
  for (int i = 0; i < n; ++i) n1 += labels[i];
  const int n0 = n - n1;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = dist(i, j);
      if (labels[i] != labels[j])
        sxy += d;
      else if (labels[i] == 1)
        sxx += d;
      else
        syy += d;
    }
  return 2.0 * sxy / (double(n1) * n0) - 2.0 * sxx / (double(n1) * n1) -
         2.0 * syy / (double(n0) * n0);
}

double mmd_from_kernel(const Matrix& kernel, const std::vector<int>& labels) {
  const int n = static_cast<int>(kernel.rows());
  double k11 = 0.0, k00 = 0.0, k10 = 0.0;
  int n1 = 0;
  for (int i = 0; i < n; ++i) n1 += labels[i];
  const int n0 = n - n1;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = kernel(i, j);
      if (labels[i] != labels[j])
        k10 += v;
      else if (labels[i] == 1)
        k11 += v;
      else
        k00 += v;
    }
  // V-statistic: diagonals (kernel value 1) included
  const double m11 = (2.0 * k11 + n1) / (double(n1) * n1);
  const double m00 = (2.0 * k00 + n0) / (double(n0) * n0);
  const double m10 = 2.0 * k10 / (2.0 * double(n1) * n0);
  return m11 + m00 - 2.0 * m10;
}

Matrix gaussian_kernel(const Matrix& pts, double h) {
  Matrix dist = pairwise_distances(pts);
  return (-dist.array().square() / (2.0 * h * h)).exp();
}

double pooled_variance_sum(const Matrix& pts) {
  const int n = static_cast<int>(pts.rows());
  const Eigen::RowVectorXd mean = pts.colwise().mean();
  return (pts.rowwise() - mean).squaredNorm() / double(n - 1);
}

}  // namespace

double knn_statistic(const Matrix& pts, const std::vector<int>& labels, int k) {
  const int n = static_cast<int>(pts.rows());
  if (static_cast<int>(labels.size()) != n)
    throw data_error("label vector length does not match the data");
  check_two_groups(labels);
  if (k < 1 || k > n - 1) throw data_error("neighbor count out of range");
  return knn_count(neighbor_lists(pairwise_distances(pts), k), labels);
}

double energy_statistic(const Matrix& pts, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != pts.rows())
    throw data_error("label vector length does not match the data");
  check_two_groups(labels);
  return energy_from_dist(pairwise_distances(pts), labels);
}

double mmd_bandwidth(double s2, int n, int d, double beta) {
  if (s2 <= 0 || n < 2 || d < 1 || beta <= 0)
    throw data_error("invalid bandwidth parameters");
  return std::sqrt(s2) * std::pow(double(n), -1.0 / (d + 2.0 * beta));
}

double mmd_statistic(const Matrix& pts, const std::vector<int>& labels, int d,
                     double beta) {
  if (static_cast<int>(labels.size()) != pts.rows())
    throw data_error("label vector length does not match the data");
  check_two_groups(labels);
  const double h = mmd_bandwidth(pooled_variance_sum(pts),
                                 static_cast<int>(pts.rows()), d, beta);
  return mmd_from_kernel(gaussian_kernel(pts, h), labels);
}

std::string method_name(Method m) {
  switch (m) {
    case Method::DW: return "dw";
    case Method::KNN: return "knn";
    case Method::Energy: return "energy";
    case Method::MMD: return "mmd";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "dw") return Method::DW;
  if (name == "knn") return Method::KNN;
  if (name == "energy") return Method::Energy;
  if (name == "mmd") return Method::MMD;
  return std::nullopt;
}

TestResult permutation_wrap(Method method, const Matrix& pts,
                            const std::vector<int>& labels,
                            const BaselineOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(pts.rows());
  if (static_cast<int>(labels.size()) != n)
    throw data_error("label vector length does not match the data");
  check_two_groups(labels);
  if (opts.B < 1) throw data_error("permutation count must be positive");
  if (method == Method::DW)
    throw data_error("the Delaunay test runs through run_dw_test");

  int d_used = 0;
  int k_used = 0;
  std::function<double(const std::vector<int>&)> stat;

  // pairwise caches are label-free, so permutations reuse them
  std::vector<std::vector<int>> nn;
  Matrix dist, kernel;
  switch (method) {
    case Method::KNN: {
      d_used = opts.d ? *opts.d : estimate_intrinsic_dimension(pts);
      k_used = opts.k ? *opts.k : d_used + 1;
      if (k_used < 1 || k_used > n - 1)
        throw data_error("neighbor count out of range");
      nn = neighbor_lists(pairwise_distances(pts), k_used);
      stat = [&nn](const std::vector<int>& l) { return knn_count(nn, l); };
      break;
    }
    case Method::Energy: {
      dist = pairwise_distances(pts);
      stat = [&dist](const std::vector<int>& l) {
        return energy_from_dist(dist, l);
      };
      break;
    }
    case Method::MMD: {
      d_used = opts.d ? *opts.d : estimate_intrinsic_dimension(pts);
      const double h = mmd_bandwidth(pooled_variance_sum(pts), n, d_used,
                                     opts.beta);
      kernel = gaussian_kernel(pts, h);
      stat = [&kernel](const std::vector<int>& l) {
        return mmd_from_kernel(kernel, l);
      };
      break;
    }
    default:
      throw data_error("unknown method");
  }

  const double t_obs = stat(labels);
  std::vector<double> permuted(opts.B);
  parallel_for(
      opts.B,
      [&](std::int64_t b) {
        Rng rng(Rng::fork_seed(opts.seed, static_cast<std::uint64_t>(b)));
        permuted[b] = stat(shuffle_labels(labels, rng));
      },
      opts.threads);
  int geq = 0;
  for (double t : permuted)
    if (t_obs <= t) ++geq;

  TestResult result;
  result.method = method_name(method);
  result.statistic = t_obs;
  result.p_value = double(geq + 1) / double(opts.B + 1);
  result.B = opts.B;
  result.seed = opts.seed;
  result.d_used = d_used;
  result.d_estimated = !opts.d.has_value() && method != Method::Energy;
  result.k_used = k_used;
  result.n = n;
  result.n1 = static_cast<int>(std::count(labels.begin(), labels.end(), 1));
  result.n0 = n - result.n1;
  result.permuted = std::move(permuted);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

bool is_image_scenario(const ScenarioSpec& spec) {
  return spec.name.rfind("image", 0) == 0;
}

LabeledSample generate_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
  if (spec.name == "gaussian-null")
    return gen_gaussian_null(spec.n1, spec.n0, spec.d, seed);
  if (spec.name == "gaussian-location") {
    const double r = spec.radius >= 0 ? spec.radius
                                      : default_location_radius(spec.d);
    return gen_gaussian_location(spec.n1, spec.n0, spec.d, r, seed);
  }
  if (spec.name == "gaussian-direction")
    return gen_gaussian_direction(spec.n1, spec.n0, spec.d, spec.scale, seed);

  ImageScenario img;
  if (spec.name == "image-null")
    img = ImageScenario::Null;
  else if (spec.name == "image-location")
    img = ImageScenario::Location;
  else if (spec.name == "image-direction")
    img = ImageScenario::Direction;
  else
    throw data_error("unknown scenario: " + spec.name);
  const ImageTemplate tpl = spec.template_csv
                                ? load_image_template_csv(*spec.template_csv)
                                : default_image_template();
  return gen_image_sample(tpl, img, spec.n1, spec.n0, seed);
}

BenchmarkReport run_benchmark(const ScenarioSpec& spec,
                              const std::vector<Method>& methods, int R,
                              const BenchmarkOptions& opts) {
  if (R < 1) throw data_error("replicate count must be positive");
  if (methods.empty()) throw data_error("no methods selected");
  const int M = static_cast<int>(methods.size());

  BenchmarkReport report;
  report.scenario = spec;
  report.methods = methods;
  report.replicates = R;
  report.seed = opts.seed;
  report.alphas = opts.alphas;
  report.pvalues.resize(R, M);

  parallel_for(
      R,
      [&](std::int64_t r) {
        const std::uint64_t seed_r =
            Rng::fork_seed(opts.seed, static_cast<std::uint64_t>(r));
        const LabeledSample data = generate_scenario(spec, seed_r);
        for (int m = 0; m < M; ++m) {
          const std::uint64_t perm_seed = Rng::fork_seed(seed_r, 0x1000 + m);
          if (methods[m] == Method::DW) {
            DwOptions dopts;
            dopts.d = opts.d;
            dopts.k = opts.k;
            dopts.eta = opts.eta;
            dopts.B = opts.B;
            dopts.seed = perm_seed;
            dopts.threads = 1;
            report.pvalues(r, m) = run_dw_test(data, dopts).p_value;
          } else {
            BaselineOptions bopts;
            bopts.d = opts.d;
            bopts.k = opts.k;
            bopts.beta = opts.beta;
            bopts.B = opts.B;
            bopts.seed = perm_seed;
            bopts.threads = 1;
            report.pvalues(r, m) =
                permutation_wrap(methods[m], data.points, data.labels, bopts)
                    .p_value;
          }
        }
      },
      opts.threads);

  const int A = static_cast<int>(opts.alphas.size());
  report.rejections.resize(M, A);
  for (int m = 0; m < M; ++m)
    for (int a = 0; a < A; ++a)
      report.rejections(m, a) =
          (report.pvalues.col(m).array() <= opts.alphas[a]).cast<double>().mean();
  return report;
}

void write_benchmark_csv(const std::string& prefix,
                         const BenchmarkReport& report,
                         const std::vector<std::string>& comments) {
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };

  std::vector<std::vector<std::string>> ecdf_rows;
  for (std::size_t m = 0; m < report.methods.size(); ++m)
    for (int r = 0; r < report.replicates; ++r)
      ecdf_rows.push_back({method_name(report.methods[m]),
                           fmt(report.pvalues(r, static_cast<int>(m)))});
  write_csv(prefix + "_ecdf.csv", comments, {"method", "p_value"}, ecdf_rows);

  std::vector<std::vector<std::string>> rej_rows;
  for (std::size_t m = 0; m < report.methods.size(); ++m)
    for (std::size_t a = 0; a < report.alphas.size(); ++a)
      rej_rows.push_back({method_name(report.methods[m]), fmt(report.alphas[a]),
                          fmt(report.rejections(static_cast<int>(m),
                                                static_cast<int>(a)))});
  write_csv(prefix + "_rejections.csv", comments,
            {"method", "alpha", "rejection"}, rej_rows);
}

}  // namespace dwt
