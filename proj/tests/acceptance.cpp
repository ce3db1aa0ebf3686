// Acceptance gate for the Delaunay-weighted two-sample test. Runs ten
// independent checks covering statistical calibration, exact-moment and
// triangulation oracles, structural invariants, and power ordering against
// the energy baseline. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any fail. Thresholds are pinned as constants below.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "dwt/baselines.hpp"
#include "dwt/dwtest.hpp"
#include "oracles.hpp"

using namespace dwt;

namespace {

// --- pinned thresholds -----------------------------------------------------
constexpr double kAlpha = 0.05;
constexpr double kSizeLo = 0.03, kSizeHi = 0.07;   // null rejection band
constexpr double kSizeKs = 0.08;                   // null p-value KS bound
constexpr double kMomentTol = 1e-10;               // enumeration match
constexpr double kRowSumTol = 1e-9;                // weight row sums
constexpr double kReconTol = 1e-8;                 // relative reconstruction
constexpr double kContainTol = 1e-7;               // oracle containment slack
constexpr double kPowerMargin = 0.05;              // DW minus energy
constexpr double kLocationFloor = 0.30;            // location rejection floor
constexpr int kDimLo = 2, kDimHi = 6;              // image dimension window
constexpr double kZTestKs = 0.10;                  // gaussian-limit KS bound
constexpr double kGridTol = 1e-9;                  // permutation grid snap

struct Outcome {
  bool pass = false;
  std::string detail;
};

void report(int index, const char* name, const Outcome& o) {
  std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name,
              o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0.0,
                double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

Matrix centered_normals(int n, int d, Rng& rng) {
  Matrix pts(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) pts(i, j) = rng.normal();
  pts.rowwise() -= pts.colwise().mean();
  return pts;
}

// 1. Null rejection rate at level 0.05 stays in the binomial band and the
//    permutation p-values are close to uniform.
Outcome size_calibration() {
  const int R = 500;
  std::vector<double> pvals(R);
  int rejections = 0;
  for (int r = 0; r < R; ++r) {
    const LabeledSample s =
        gen_gaussian_null(50, 50, 20, Rng::fork_seed(101, r));
    DwOptions opt;
    opt.B = 200;
    opt.seed = Rng::fork_seed(201, r);
    pvals[r] = run_dw_test(s, opt).p_value;
    if (pvals[r] <= kAlpha) ++rejections;
  }
  const double rate = double(rejections) / R;
  const double ks = oracle::ks_uniform(pvals);
  Outcome o;
  o.pass = rate >= kSizeLo && rate <= kSizeHi && ks < kSizeKs;
  o.detail = fmt("rejection=%.3f (band [0.030,0.070]), ks=%.3f (< 0.080)",
                 rate, ks);
  return o;
}

// 2. Closed-form null moments equal exhaustive enumeration over all label
//    assignments for random row-stochastic weight matrices.
Outcome moment_oracle() {
  Rng rng(333);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int n = 6 + 2 * (t % 3);
    const int n1 = 2 + static_cast<int>(rng.below(n - 3));
    const Matrix W = oracle::random_row_stochastic(n, rng);
    WeightMatrix wm;
    wm.n = n;
    wm.dim = 2;
    wm.rows.resize(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (W(i, j) != 0.0) wm.rows[i].entries.push_back({j, W(i, j)});
    const NullMoments nm = null_moments(wm, n1, n - n1);
    const oracle::EnumeratedMoments em = oracle::enumerate_moments(W, n1);
    worst = std::max(worst, std::abs(nm.mean - em.mean));
    worst = std::max(worst, std::abs(nm.variance - em.variance));
  }
  Outcome o;
  o.pass = worst <= kMomentTol;
  o.detail = fmt("max |closed-form - enumeration| = %.2e (<= 1e-10)", worst);
  return o;
}

// 3. For random generic clouds, every located simplex passes the empty-ball
//    check and appears in the reference triangulation of the remaining
//    points, containing the realized hull projection.
Outcome triangulation_oracle() {
  int clouds = 0, queries = 0;
  for (int t = 0; t < 50; ++t) {
    const int d = 1 + t % 3;
    Rng rng(Rng::fork_seed(555, t));
    const int n = d + 3 + static_cast<int>(rng.below(40 - (d + 3) + 1));
    EmbeddedCloud cloud{centered_normals(n, d, rng), d};
    const SphereCloud sphere = lift_cloud(cloud);
    for (int i = 0; i < n; ++i) {
      const SimplexHandle located = locate_simplex(sphere, i);
      if (!verify_empty_ball(cloud, located, i))
        return {false, fmt("empty-ball failed (cloud %.0f, query %.0f)",
                           double(t), double(i))};
      const WeightRow wr = weight_row(cloud, i, located);

      EmbeddedCloud minus{Matrix(n - 1, d), d};
      for (int r = 0, w = 0; r < n; ++r)
        if (r != i) minus.coords.row(w++) = cloud.coords.row(r);
      std::vector<int> mapped;
      for (int v : located.vertices) mapped.push_back(v - (v > i ? 1 : 0));
      std::sort(mapped.begin(), mapped.end());

      const std::vector<SimplexHandle> tris = brute_force_delaunay(minus);
      const bool listed =
          std::any_of(tris.begin(), tris.end(), [&](const SimplexHandle& s) {
            return s.vertices == mapped;
          });
      if (!listed)
        return {false, fmt("located simplex not in reference set "
                           "(cloud %.0f, query %.0f)",
                           double(t), double(i))};
      if (!oracle::simplex_contains(minus.coords, mapped, wr.projection,
                                    kContainTol))
        return {false, fmt("projection outside located simplex "
                           "(cloud %.0f, query %.0f)",
                           double(t), double(i))};
      ++queries;
    }
    ++clouds;
  }
  return {true, fmt("%.0f clouds, %.0f queries, all located simplices "
                    "verified",
                    double(clouds), double(queries))};
}

// 4. Weight-matrix invariants on clouds up to d=50, n=500: rows sum to one,
//    entries in [0,1], zero diagonal, at most d+1 nonzeros, and the weighted
//    vertex combination reproduces the stored projection.
Outcome weight_invariants() {
  const std::vector<std::pair<int, int>> ladder = {
      {1, 40}, {2, 80}, {3, 120}, {5, 160}, {10, 240}, {20, 320}, {50, 500}};
  long long rows_checked = 0;
  for (std::size_t c = 0; c < ladder.size(); ++c) {
    const auto [d, n] = ladder[c];
    Rng rng(Rng::fork_seed(777, c));
    EmbeddedCloud cloud{centered_normals(n, d, rng), d};
    const WeightMatrix wm = weight_matrix(cloud);
    for (int i = 0; i < n; ++i) {
      const WeightRow& row = wm.rows[i];
      if (static_cast<int>(row.entries.size()) > d + 1)
        return {false, fmt("row has more than d+1 nonzeros (d=%.0f, i=%.0f)",
                           double(d), double(i))};
      double sum = 0.0;
      Vector recon = Vector::Zero(d);
      for (const auto& [j, g] : row.entries) {
        if (j == i) return {false, fmt("nonzero diagonal at i=%.0f",
                                       double(i))};
        if (g < 0.0 || g > 1.0 + 1e-12)
          return {false, fmt("weight outside [0,1]: %.3e", g)};
        sum += g;
        recon += g * cloud.coords.row(j).transpose();
      }
      if (std::abs(sum - 1.0) > kRowSumTol)
        return {false, fmt("row sum off by %.2e (d=%.0f)", sum - 1.0,
                           double(d))};
      const double zi = cloud.coords.row(i).norm();
      if ((recon - row.projection).norm() > kReconTol * (1.0 + zi))
        return {false, fmt("reconstruction residual %.2e at d=%.0f",
                           (recon - row.projection).norm(), double(d))};
      ++rows_checked;
    }
  }
  return {true, fmt("%.0f rows over 7 clouds up to d=50, n=500; all "
                    "invariants hold",
                    double(rows_checked))};
}

// 5. The located simplices do not depend on the sphere inflation factor.
Outcome inflation_stability() {
  const std::vector<int> dims = {1, 2, 3, 5};
  for (int t = 0; t < 20; ++t) {
    const int d = dims[t % dims.size()];
    Rng rng(Rng::fork_seed(999, t));
    const int n = 20 + static_cast<int>(rng.below(41));
    EmbeddedCloud cloud{centered_normals(n, d, rng), d};
    std::vector<std::vector<int>> reference;
    for (const double eta : {5.0, 10.0, 20.0}) {
      const SphereCloud sphere = lift_cloud(cloud, eta);
      for (int i = 0; i < n; ++i) {
        std::vector<int> verts = locate_simplex(sphere, i).vertices;
        std::sort(verts.begin(), verts.end());
        if (eta == 5.0) {
          reference.push_back(std::move(verts));
        } else if (verts != reference[i]) {
          return {false,
                  fmt("simplex changed with inflation (cloud %.0f, query "
                      "%.0f, eta %.0f)",
                      double(t), double(i), eta)};
        }
      }
    }
  }
  return {true, std::string("identical simplices for inflation factors "
                            "5, 10, 20 on 20 clouds")};
}

// 6. On the covariance-direction alternative the DW rejection rate beats the
//    energy test by the pinned absolute margin.
Outcome direction_power_margin() {
  const int R = 200;
  int dw = 0, energy = 0;
  for (int r = 0; r < R; ++r) {
    const LabeledSample s = gen_gaussian_direction(
        100, 100, 20, kDefaultDirectionScale, Rng::fork_seed(1301, r));
    DwOptions opt;
    opt.B = 200;
    opt.seed = Rng::fork_seed(1401, r);
    if (run_dw_test(s, opt).p_value <= kAlpha) ++dw;
    BaselineOptions bo;
    bo.B = 200;
    bo.seed = Rng::fork_seed(1501, r);
    if (permutation_wrap(Method::Energy, s.points, s.labels, bo).p_value <=
        kAlpha)
      ++energy;
  }
  const double rdw = double(dw) / R, re = double(energy) / R;
  Outcome o;
  o.pass = rdw >= re + kPowerMargin;
  o.detail = fmt("dw=%.3f energy=%.3f (margin %.3f >= 0.050)", rdw, re,
                 rdw - re);
  return o;
}

// 7. Location-shift power reaches the floor at n1=n0=100 and grows with the
//    sample size.
Outcome location_power() {
  const int R = 200;
  const double radius = default_location_radius(20);
  double rates[2] = {0.0, 0.0};
  const int sizes[2] = {50, 100};
  for (int s = 0; s < 2; ++s) {
    int rej = 0;
    for (int r = 0; r < R; ++r) {
      const LabeledSample sample = gen_gaussian_location(
          sizes[s], sizes[s], 20, radius, Rng::fork_seed(1601 + s, r));
      DwOptions opt;
      opt.B = 200;
      opt.seed = Rng::fork_seed(1701 + s, r);
      if (run_dw_test(sample, opt).p_value <= kAlpha) ++rej;
    }
    rates[s] = double(rej) / R;
  }
  Outcome o;
  o.pass = rates[1] >= kLocationFloor && rates[1] > rates[0];
  o.detail = fmt("rejection n=100: %.3f at n1=n0=50 -> %.3f at n1=n0=100 "
                 "(floor 0.300, increasing)",
                 rates[0], rates[1]);
  return o;
}

// 8. The two-nearest-neighbor estimate of the image manifold's intrinsic
//    dimension lands in the expected window.
Outcome image_dimension() {
  const ImageTemplate tpl = default_image_template();
  const Matrix images =
      gen_image_manifold(tpl, ImageScenario::Null, 1, 500, 1801);
  const int est = estimate_intrinsic_dimension(images);
  Outcome o;
  o.pass = est >= kDimLo && est <= kDimHi;
  o.detail = fmt("estimated dimension %.0f on 500 images (window [2,6])",
                 double(est));
  return o;
}

// 9. The standardized statistic's normal-approximation p-values are close to
//    uniform under the null at n=200.
Outcome gaussian_limit_calibration() {
  const int R = 500;
  std::vector<double> pvals(R);
  for (int r = 0; r < R; ++r) {
    const LabeledSample s =
        gen_gaussian_null(100, 100, 20, Rng::fork_seed(1901, r));
    const EmbedResult er = embed(s.points, {});
    const WeightMatrix wm = weight_matrix(er.cloud);
    pvals[r] = z_test(wm, s.labels).p_value;
  }
  const double ks = oracle::ks_uniform(pvals);
  Outcome o;
  o.pass = ks < kZTestKs;
  o.detail = fmt("ks=%.3f over 500 normal-approximation p-values (< 0.100)",
                 ks);
  return o;
}

// 10. Permutation p-values land exactly on the grid {1/(B+1), ..., 1}, and a
//     strictly dominant observed statistic yields exactly 1/(B+1).
Outcome permutation_grid() {
  const int B = 200;
  for (int r = 0; r < 50; ++r) {
    const LabeledSample s = gen_gaussian_null(20, 20, 5, Rng::fork_seed(2101, r));
    DwOptions opt;
    opt.B = B;
    opt.seed = Rng::fork_seed(2201, r);
    const double p = run_dw_test(s, opt).p_value;
    const double scaled = p * (B + 1);
    if (p < 1.0 / (B + 1) - kGridTol || p > 1.0 + kGridTol ||
        std::abs(scaled - std::lround(scaled)) > kGridTol)
      return {false, fmt("off-grid p-value %.12f", p)};
  }

  // two widely separated clusters: observed beats every permutation
  Rng rng(2301);
  Matrix pts(20, 3);
  std::vector<int> labels(20);
  for (int i = 0; i < 20; ++i) {
    labels[i] = i < 10 ? 1 : 0;
    for (int j = 0; j < 3; ++j)
      pts(i, j) = 0.1 * rng.normal() + (i < 10 ? 0.0 : 100.0);
  }
  LabeledSample s{pts, labels, 10, 10};
  DwOptions opt;
  opt.B = B;
  opt.seed = 2401;
  const double p = run_dw_test(s, opt).p_value;
  Outcome o;
  o.pass = std::abs(p - 1.0 / (B + 1)) <= kGridTol;
  o.detail = fmt("50 null p-values on the 1/201 grid; separated clusters "
                 "give p=%.6f (= 1/201)",
                 p);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"size calibration", size_calibration},
      {"moment oracle", moment_oracle},
      {"triangulation oracle", triangulation_oracle},
      {"weight invariants", weight_invariants},
      {"inflation stability", inflation_stability},
      {"direction power margin", direction_power_margin},
      {"location power", location_power},
      {"image manifold dimension", image_dimension},
      {"gaussian limit calibration", gaussian_limit_calibration},
      {"permutation grid exactness", permutation_grid},
  };
  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    report(index, c.name, o);
  }
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
