#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dwt/baselines.hpp"
#include "dwt/csv.hpp"
#include "dwt/dataset.hpp"
#include "dwt/dwtest.hpp"
#include "dwt/manifold.hpp"
#include "dwt/rng.hpp"

namespace {

using namespace dwt;

// Flattened flag set shared by the subcommands.
struct RunConfig {
  std::string input, label, method = "dw", scenario, output;
  std::optional<std::string> group1;
  std::string permuted_output, distances_output, template_csv;
  std::optional<int> d, k;
  double eta = kDefaultEta;
  double beta = 1.0;
  double radius = -1.0;  // <0 = scenario default
  double scale = kDefaultDirectionScale;
  int B = 200;
  int n1 = 50, n0 = 50;
  int replicates = 100;
  int threads = 0;
  std::uint64_t seed = 1;
  std::vector<double> alphas;
  bool jitter = false;
  bool use_z = false;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Deterministic relative perturbation for non-generic inputs (exact ties).
void apply_jitter(LabeledSample& sample, std::uint64_t seed) {
  const double scale = sample.points.cwiseAbs().maxCoeff();
  if (scale <= 0) return;
  Rng rng(Rng::fork_seed(seed, 0x6a69747465724aULL));
  for (int i = 0; i < sample.points.rows(); ++i)
    for (int j = 0; j < sample.points.cols(); ++j)
      sample.points(i, j) += 1e-9 * scale * (2.0 * rng.uniform() - 1.0);
}

LabeledSample load_input(const RunConfig& cfg) {
  CsvOptions opts;
  opts.label_column = cfg.label;
  opts.group1_value = cfg.group1;
  LabeledSample sample = load_csv(cfg.input, opts);
  if (cfg.jitter) apply_jitter(sample, cfg.seed);
  return sample;
}

void emit_report(const RunConfig& cfg, const TestResult& r) {
  std::ostringstream os;
  os << "method=" << r.method << "\n"
     << "statistic=" << fmt(r.statistic) << "\n"
     << "p_value=" << fmt(r.p_value) << "\n"
     << "d_used=" << r.d_used << "\n"
     << "d_estimated=" << (r.d_estimated ? "true" : "false") << "\n"
     << "k_used=" << r.k_used << "\n"
     << "eta=" << fmt(r.eta) << "\n"
     << "B=" << r.B << "\n"
     << "seed=" << r.seed << "\n"
     << "n=" << r.n << "\n"
     << "n1=" << r.n1 << "\n"
     << "n0=" << r.n0 << "\n"
     << "wall_time=" << fmt(r.wall_seconds) << "\n";
  std::cout << os.str();
  if (!cfg.output.empty()) {
    std::ofstream out(cfg.output);
    if (!out) throw data_error("cannot write file: " + cfg.output);
    out << os.str();
  }
}

int cmd_test(const RunConfig& cfg) {
  const LabeledSample sample = load_input(cfg);
  const auto method = parse_method(cfg.method);
  if (!method) throw data_error("unknown method: " + cfg.method);

  TestResult result;
  if (*method == Method::DW) {
    DwOptions opts;
    opts.d = cfg.d;
    opts.k = cfg.k;
    opts.eta = cfg.eta;
    opts.B = cfg.B;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    opts.use_z = cfg.use_z;
    result = run_dw_test(sample, opts);
  } else {
    BaselineOptions opts;
    opts.d = cfg.d;
    opts.k = cfg.k;
    opts.beta = cfg.beta;
    opts.B = cfg.B;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    result = permutation_wrap(*method, sample.points, sample.labels, opts);
  }
  emit_report(cfg, result);

  if (!cfg.permuted_output.empty() && !result.permuted.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t b = 0; b < result.permuted.size(); ++b)
      rows.push_back({std::to_string(b), fmt(result.permuted[b])});
    write_csv(cfg.permuted_output,
              {"permuted statistics, method=" + result.method,
               "seed=" + std::to_string(result.seed)},
              {"b", "statistic"}, rows);
  }
  return 0;
}

ScenarioSpec make_scenario(const RunConfig& cfg) {
  ScenarioSpec spec;
  std::string name = cfg.scenario;
  // short aliases for the gaussian family
  if (name == "null" || name == "location" || name == "direction")
    name = "gaussian-" + name;
  spec.name = name;
  spec.d = cfg.d.value_or(20);
  spec.n1 = cfg.n1;
  spec.n0 = cfg.n0;
  spec.radius = cfg.radius;
  spec.scale = cfg.scale;
  if (!cfg.template_csv.empty()) spec.template_csv = cfg.template_csv;
  return spec;
}

int cmd_simulate(const RunConfig& cfg) {
  const ScenarioSpec spec = make_scenario(cfg);
  const LabeledSample sample = generate_scenario(spec, cfg.seed);
  std::vector<std::string> comments = {
      std::string("dwt ") + kVersion + " simulate",
      "scenario=" + spec.name + " n1=" + std::to_string(spec.n1) +
          " n0=" + std::to_string(spec.n0) + " seed=" + std::to_string(cfg.seed)};
  if (cfg.output.empty()) {
    // header + rows to stdout
    std::cout << "# " << comments[0] << "\n# " << comments[1] << "\n";
    std::cout << "label";
    for (int j = 0; j < sample.dim(); ++j) std::cout << ",x" << j + 1;
    std::cout << "\n";
    for (int i = 0; i < sample.n(); ++i) {
      std::cout << sample.labels[i];
      for (int j = 0; j < sample.dim(); ++j)
        std::cout << ',' << fmt(sample.points(i, j));
      std::cout << "\n";
    }
  } else {
    write_sample_csv(cfg.output, sample, comments);
  }
  return 0;
}

int cmd_benchmark(const RunConfig& cfg,
                  const std::vector<std::string>& method_names) {
  std::vector<Method> methods;
  for (const auto& name : method_names) {
    const auto m = parse_method(name);
    if (!m) throw data_error("unknown method: " + name);
    methods.push_back(*m);
  }
  const ScenarioSpec spec = make_scenario(cfg);
  BenchmarkOptions opts;
  opts.d = cfg.d;
  opts.k = cfg.k;
  opts.eta = cfg.eta;
  opts.beta = cfg.beta;
  opts.B = cfg.B;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;
  if (!cfg.alphas.empty()) opts.alphas = cfg.alphas;

  const BenchmarkReport report =
      run_benchmark(spec, methods, cfg.replicates, opts);

  std::ostringstream head;
  head << "scenario=" << spec.name << " replicates=" << report.replicates
       << " B=" << cfg.B << " seed=" << cfg.seed;
  const std::string prefix = cfg.output.empty() ? "benchmark" : cfg.output;
  write_benchmark_csv(prefix, report,
                      {std::string("dwt ") + kVersion + " benchmark",
                       head.str()});

  std::cout << "scenario=" << spec.name << " replicates=" << report.replicates
            << "\n";
  for (std::size_t m = 0; m < methods.size(); ++m) {
    std::cout << method_name(methods[m]) << ":";
    for (std::size_t a = 0; a < report.alphas.size(); ++a)
      std::cout << " reject@" << report.alphas[a] << "="
                << report.rejections(static_cast<int>(m), static_cast<int>(a));
    std::cout << "\n";
  }
  std::cout << "wrote " << prefix << "_ecdf.csv and " << prefix
            << "_rejections.csv\n";
  return 0;
}

int cmd_embed(const RunConfig& cfg) {
  const LabeledSample sample = load_input(cfg);
  EmbedOptions opts;
  opts.d = cfg.d;
  opts.k = cfg.k;
  opts.threads = cfg.threads;
  const EmbedResult res = embed(sample.points, opts);

  std::vector<std::string> header;
  for (int j = 0; j < res.d_used; ++j) header.push_back("y" + std::to_string(j + 1));
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < res.cloud.coords.rows(); ++i) {
    std::vector<std::string> row;
    for (int j = 0; j < res.d_used; ++j) row.push_back(fmt(res.cloud.coords(i, j)));
    rows.push_back(std::move(row));
  }
  const std::vector<std::string> comments = {
      std::string("dwt ") + kVersion + " embed",
      "d_used=" + std::to_string(res.d_used) +
          " d_estimated=" + (res.d_estimated ? "true" : "false") +
          " k_used=" + std::to_string(res.k_used)};
  if (cfg.output.empty()) throw data_error("embed needs --output");
  write_csv(cfg.output, comments, header, rows);
  std::cout << "d_used=" << res.d_used << "\n"
            << "d_estimated=" << (res.d_estimated ? "true" : "false") << "\n"
            << "k_used=" << res.k_used << "\n"
            << "wrote " << cfg.output << "\n";

  if (!cfg.distances_output.empty()) {
    const int n = static_cast<int>(res.distances.rows());
    std::vector<std::string> dh;
    for (int j = 0; j < n; ++j) dh.push_back("g" + std::to_string(j + 1));
    std::vector<std::vector<std::string>> drows;
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> row;
      for (int j = 0; j < n; ++j) row.push_back(fmt(res.distances(i, j)));
      drows.push_back(std::move(row));
    }
    write_csv(cfg.distances_output,
              {std::string("dwt ") + kVersion + " geodesic distances"}, dh,
              drows);
    std::cout << "wrote " << cfg.distances_output << "\n";
  }
  return 0;
}

int cmd_inspect_weights(const RunConfig& cfg) {
  const LabeledSample sample = load_input(cfg);
  EmbedOptions eopts;
  eopts.d = cfg.d;
  eopts.k = cfg.k;
  eopts.threads = cfg.threads;
  const EmbedResult res = embed(sample.points, eopts);
  const WeightMatrix wm = weight_matrix(res.cloud, cfg.eta, cfg.threads);

  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < wm.n; ++i)
    for (const auto& [j, g] : wm.rows[i].entries)
      rows.push_back({std::to_string(i), std::to_string(j), fmt(g)});
  const std::vector<std::string> comments = {
      std::string("dwt ") + kVersion + " inspect-weights (0-based indices)",
      "d_used=" + std::to_string(res.d_used) + " eta=" + fmt(cfg.eta)};
  if (cfg.output.empty()) throw data_error("inspect-weights needs --output");
  write_csv(cfg.output, comments, {"i", "j", "gamma"}, rows);
  std::cout << "n=" << wm.n << "\nd_used=" << res.d_used << "\nwrote "
            << cfg.output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delaunay-weighted two-sample testing for data on manifolds"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<std::string> methods{"dw"};

  auto add_common = [&](CLI::App* sub, bool with_input) {
    if (with_input) {
      sub->add_option("--input", cfg.input, "input CSV file")->required();
      sub->add_option("--label", cfg.label, "label column (name or 0-based index)")
          ->required();
      sub->add_option("--group1", cfg.group1,
                      "label value mapped to group 1 (default: smaller value)");
      sub->add_flag("--jitter", cfg.jitter,
                    "deterministic 1e-9 relative perturbation for ties");
    }
    sub->add_option("--d", cfg.d, "embedding/intrinsic dimension (default: estimated)");
    sub->add_option("--k", cfg.k, "neighbor count");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  };

  auto* test = app.add_subcommand("test", "two-sample test on a CSV dataset");
  add_common(test, true);
  test->add_option("--method", cfg.method, "dw | knn | energy | mmd");
  test->add_option("--eta", cfg.eta, "sphere inflation factor");
  test->add_option("--B", cfg.B, "permutation replicates");
  test->add_option("--beta", cfg.beta, "kernel bandwidth exponent parameter");
  test->add_flag("--use-z", cfg.use_z, "Gaussian-limit test instead of permutations");
  test->add_option("--output", cfg.output, "report file (key=value lines)");
  test->add_option("--permuted-output", cfg.permuted_output,
                   "CSV of permuted statistics");

  auto* sim = app.add_subcommand("simulate", "draw a synthetic dataset");
  add_common(sim, false);
  sim->add_option("--scenario", cfg.scenario,
                  "gaussian-{null,location,direction} or image-{null,location,direction}")
      ->required();
  sim->add_option("--n1", cfg.n1, "group-1 size");
  sim->add_option("--n0", cfg.n0, "group-0 size");
  sim->add_option("--radius", cfg.radius, "location shift radius");
  sim->add_option("--scale", cfg.scale, "direction scale factor");
  sim->add_option("--template", cfg.template_csv, "image template CSV");
  sim->add_option("--output", cfg.output, "output CSV (default: stdout)");

  auto* bench = app.add_subcommand("benchmark", "power/size study over replicated draws");
  add_common(bench, false);
  bench->add_option("--scenario", cfg.scenario, "scenario name")->required();
  bench->add_option("--method", methods, "methods to compare")
      ->delimiter(',');
  bench->add_option("--n1", cfg.n1, "group-1 size");
  bench->add_option("--n0", cfg.n0, "group-0 size");
  bench->add_option("--radius", cfg.radius, "location shift radius");
  bench->add_option("--scale", cfg.scale, "direction scale factor");
  bench->add_option("--template", cfg.template_csv, "image template CSV");
  bench->add_option("--replicates", cfg.replicates, "Monte-Carlo replicates");
  bench->add_option("--B", cfg.B, "permutation replicates per test");
  bench->add_option("--eta", cfg.eta, "sphere inflation factor");
  bench->add_option("--beta", cfg.beta, "kernel bandwidth exponent parameter");
  bench->add_option("--alpha", cfg.alphas, "rejection levels")->delimiter(',');
  bench->add_option("--output", cfg.output, "output prefix (default: benchmark)");

  auto* emb = app.add_subcommand("embed", "export the manifold embedding");
  add_common(emb, true);
  emb->add_option("--output", cfg.output, "coordinates CSV")->required();
  emb->add_option("--distances-output", cfg.distances_output,
                  "geodesic distance matrix CSV");

  auto* insp = app.add_subcommand("inspect-weights", "export the weight matrix");
  add_common(insp, true);
  insp->add_option("--eta", cfg.eta, "sphere inflation factor");
  insp->add_option("--output", cfg.output, "weights CSV (i,j,gamma)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (test->parsed()) return cmd_test(cfg);
    if (sim->parsed()) return cmd_simulate(cfg);
    if (bench->parsed()) return cmd_benchmark(cfg, methods);
    if (emb->parsed()) return cmd_embed(cfg);
    if (insp->parsed()) return cmd_inspect_weights(cfg);
  } catch (const dwt::data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dwt::numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
