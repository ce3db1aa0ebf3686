#include "dwt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dwt/csv.hpp"
#include "dwt/rng.hpp"

namespace dwt {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int find_label_column(const std::vector<std::string>& header,
                      const std::string& label_column) {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == label_column) return static_cast<int>(j);
  // fall back to a 0-based column index
  if (!label_column.empty() &&
      label_column.find_first_not_of("0123456789") == std::string::npos) {
    int idx = std::stoi(label_column);
    if (idx >= 0 && idx < static_cast<int>(header.size())) return idx;
  }
  throw data_error("label column '" + label_column + "' not found");
}

}  // namespace

LabeledSample load_csv(const std::string& path, const CsvOptions& opts) {
  const CsvTable table = read_csv(path);
  const int lcol = find_label_column(table.header, opts.label_column);
  const int n = static_cast<int>(table.rows.size());
  const int D = static_cast<int>(table.header.size()) - 1;
  if (n == 0) throw data_error(path + ": no data rows");
  if (D < 1) throw data_error(path + ": no feature columns");

  std::set<std::string> values;
  for (const auto& row : table.rows) values.insert(row[lcol]);
  if (values.size() != 2) {
    throw data_error(path + ": label column must hold exactly two distinct " +
                     "values, found " + std::to_string(values.size()));
  }
  std::string one = *values.begin();  // lexicographically smaller -> group 1
  if (opts.group1_value) {
    if (!values.count(*opts.group1_value))
      throw data_error(path + ": group-1 label '" + *opts.group1_value +
                       "' does not occur in column '" + opts.label_column + "'");
    one = *opts.group1_value;
  }

  LabeledSample sample;
  sample.points.resize(n, D);
  sample.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    sample.labels[i] = row[lcol] == one ? 1 : 0;
    int jj = 0;
    for (int j = 0; j < static_cast<int>(row.size()); ++j) {
      if (j == lcol) continue;
      double v;
      if (!parse_double(row[j], v))
        throw data_error(path + ": non-numeric cell '" + row[j] + "' at row " +
                         std::to_string(i + 1) + ", column '" +
                         table.header[j] + "'");
      sample.points(i, jj++) = v;
    }
  }
  sample.n1 = static_cast<int>(std::count(sample.labels.begin(),
                                          sample.labels.end(), 1));
  sample.n0 = n - sample.n1;
  if (sample.n1 < 2 || sample.n0 < 2)
    throw data_error(path + ": each group needs at least 2 rows (got " +
                     std::to_string(sample.n1) + " and " +
                     std::to_string(sample.n0) + ")");
  return sample;
}

namespace {

void check_group_sizes(int n1, int n0, int d) {
  if (n1 < 2 || n0 < 2)
    throw data_error("each group needs at least 2 points");
  if (d < 1) throw data_error("dimension must be positive");
}

LabeledSample make_sample(Matrix x, Matrix y) {
  LabeledSample s;
  const int n1 = static_cast<int>(x.rows());
  const int n0 = static_cast<int>(y.rows());
  s.points.resize(n1 + n0, x.cols());
  s.points.topRows(n1) = x;
  s.points.bottomRows(n0) = y;
  s.labels.assign(n1 + n0, 0);
  std::fill(s.labels.begin(), s.labels.begin() + n1, 1);
  s.n1 = n1;
  s.n0 = n0;
  return s;
}

Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

LabeledSample gen_gaussian_null(int n1, int n0, int d, std::uint64_t seed) {
  check_group_sizes(n1, n0, d);
  Rng rng(seed);
  Matrix x = gaussian_matrix(n1, d, rng);
  Matrix y = gaussian_matrix(n0, d, rng);
  return make_sample(std::move(x), std::move(y));
}

LabeledSample gen_gaussian_location(int n1, int n0, int d, double radius,
                                    std::uint64_t seed) {
  check_group_sizes(n1, n0, d);
  if (radius < 0) throw data_error("shift radius must be nonnegative");
  Rng rng(seed);
  // uniform direction on the sphere via a normalized Gaussian draw
  Vector delta(d);
  double norm2 = 0.0;
  do {
    for (int j = 0; j < d; ++j) delta[j] = rng.normal();
    norm2 = delta.squaredNorm();
  } while (norm2 == 0.0);
  delta *= radius / std::sqrt(norm2);
  Matrix x = gaussian_matrix(n1, d, rng);
  Matrix y = gaussian_matrix(n0, d, rng);
  y.rowwise() += delta.transpose();
  return make_sample(std::move(x), std::move(y));
}

LabeledSample gen_gaussian_direction(int n1, int n0, int d, double scale,
                                     std::uint64_t seed) {
  check_group_sizes(n1, n0, d);
  if (d % 2 != 0) throw data_error("direction scenario needs an even dimension");
  if (scale <= 0) throw data_error("scale must be positive");
  Rng rng(seed);
  Matrix x = gaussian_matrix(n1, d, rng);
  Matrix y = gaussian_matrix(n0, d, rng);
  const int h = d / 2;
  x.leftCols(h) *= scale;   // group 1 spreads along the first half
  y.rightCols(h) *= scale;  // group 0 along the second half
  return make_sample(std::move(x), std::move(y));
}

Matrix ImageTemplate::padded() const {
  const int rows = static_cast<int>(pixels.rows());
  const int cols = static_cast<int>(pixels.cols());
  Matrix out = Matrix::Zero(rows + 2 * pad, cols + 2 * pad);
  out.block(pad, pad, rows, cols) = pixels;
  return out;
}

ImageTemplate default_image_template() {
  // Smooth asymmetric glyph: a diagonal stroke plus two unequal blobs, faded
  // to zero at the borders. Integer gray levels so that the identity
  // distortion reproduces the template exactly.
  const int s = 28;
  ImageTemplate tpl;
  tpl.pixels.resize(s, s);
  auto sq = [](double t) { return t * t; };
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      const double window = std::sin(kPi * i / (s - 1)) * std::sin(kPi * j / (s - 1));
      const double stroke = std::exp(-sq(i - j) / (2.0 * 9.0));
      const double blob_a = 0.9 * std::exp(-(sq(i - 7) + sq(j - 19)) / (2.0 * 6.25));
      const double blob_b = 0.7 * std::exp(-(sq(i - 20) + sq(j - 6)) / (2.0 * 12.25));
      const double g = window * std::min(1.0, stroke + blob_a + blob_b);
      tpl.pixels(i, j) = std::floor(255.0 * g + 0.5);
    }
  }
  return tpl;
}

ImageTemplate load_image_template_csv(const std::string& path, int pad) {
  ImageTemplate tpl;
  tpl.pad = pad;
  const CsvTable table = read_csv(path);
  const int cols = static_cast<int>(table.header.size());
  const int rows = static_cast<int>(table.rows.size()) + 1;
  tpl.pixels.resize(rows, cols);
  auto parse_row = [&](const std::vector<std::string>& cells, int r) {
    for (int j = 0; j < cols; ++j) {
      double v;
      if (!parse_double(cells[j], v))
        throw data_error(path + ": non-numeric pixel at row " +
                         std::to_string(r + 1));
      tpl.pixels(r, j) = std::clamp(v, 0.0, 255.0);
    }
  };
  parse_row(table.header, 0);  // template CSVs carry no header
  for (int r = 1; r < rows; ++r) parse_row(table.rows[r - 1], r);
  return tpl;
}

namespace {

Vector render_from_padded(const Matrix& img, double theta, double h, double v) {
  const int s = static_cast<int>(img.rows());
  const double c0 = (s - 1) / 2.0;
  const double ct = std::cos(theta), st = std::sin(theta);
  Vector out(s * s);
  for (int r = 0; r < s; ++r) {
    for (int c = 0; c < s; ++c) {
      // pixel center in centered coordinates (x right, y up)
      const double xi = c - c0, eta = c0 - r;
      // pull back through the rotation+shift to the template frame
      const double xs = ct * (xi - h) + st * (eta - v);
      const double ys = -st * (xi - h) + ct * (eta - v);
      const double cs = xs + c0, rs = c0 - ys;
      const int i0 = static_cast<int>(std::floor(rs));
      const int j0 = static_cast<int>(std::floor(cs));
      const double fr = rs - i0, fc = cs - j0;
      auto at = [&](int i, int j) -> double {
        return (i >= 0 && i < s && j >= 0 && j < s) ? img(i, j) : 0.0;
      };
      const double val = (1 - fr) * ((1 - fc) * at(i0, j0) + fc * at(i0, j0 + 1)) +
                         fr * ((1 - fc) * at(i0 + 1, j0) + fc * at(i0 + 1, j0 + 1));
      out[r * s + c] = std::clamp(std::floor(val + 0.5), 0.0, 255.0);
    }
  }
  return out;
}

struct DistortionDomain {
  double theta_lo, theta_hi;  // rotation range
  double cx, cy, r;           // shift disk
};

DistortionDomain image_domain(ImageScenario scenario, int group) {
  switch (scenario) {
    case ImageScenario::Null:
      return {-kPi / 8, kPi / 8, 0.0, 0.0, 2.0};
    case ImageScenario::Location:
      if (group == 1)
        return {-19 * kPi / 160, 21 * kPi / 160, 0.05, 0.05, 2.0};
      return {-21 * kPi / 160, 19 * kPi / 160, -0.05, -0.05, 2.0};
    case ImageScenario::Direction:
      if (group == 1) return {-19 * kPi / 160, 19 * kPi / 160, 0.0, 0.0, 2.1};
      return {-21 * kPi / 160, 21 * kPi / 160, 0.0, 0.0, 1.9};
  }
  throw data_error("unknown image scenario");
}

}  // namespace

Vector render_distorted(const ImageTemplate& tpl, double theta, double h,
                        double v) {
  return render_from_padded(tpl.padded(), theta, h, v);
}

Matrix gen_image_manifold(const ImageTemplate& tpl, ImageScenario scenario,
                          int group, int count, std::uint64_t seed) {
  if (count < 1) throw data_error("image count must be positive");
  if (group != 0 && group != 1) throw data_error("group must be 0 or 1");
  const DistortionDomain dom = image_domain(scenario, group);
  const Matrix padded = tpl.padded();
  const int s = static_cast<int>(padded.rows());
  Matrix out(count, s * s);
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const double theta = dom.theta_lo + (dom.theta_hi - dom.theta_lo) * rng.uniform();
    double a, b;
    do {  // uniform point of the unit disk by rejection
      a = 2.0 * rng.uniform() - 1.0;
      b = 2.0 * rng.uniform() - 1.0;
    } while (a * a + b * b > 1.0);
    const double h = dom.cx + dom.r * a;
    const double v = dom.cy + dom.r * b;
    out.row(i) = render_from_padded(padded, theta, h, v).transpose();
  }
  return out;
}

LabeledSample gen_image_sample(const ImageTemplate& tpl, ImageScenario scenario,
                               int n1, int n0, std::uint64_t seed) {
  check_group_sizes(n1, n0, 1);
  Matrix x = gen_image_manifold(tpl, scenario, 1, n1, Rng::fork_seed(seed, 1));
  Matrix y = gen_image_manifold(tpl, scenario, 0, n0, Rng::fork_seed(seed, 0));
  return make_sample(std::move(x), std::move(y));
}

void write_sample_csv(const std::string& path, const LabeledSample& sample,
                      const std::vector<std::string>& comments) {
  std::vector<std::string> header;
  header.push_back("label");
  for (int j = 0; j < sample.dim(); ++j)
    header.push_back("x" + std::to_string(j + 1));
  std::vector<std::vector<std::string>> rows;
  rows.reserve(sample.n());
  for (int i = 0; i < sample.n(); ++i) {
    std::vector<std::string> row;
    row.reserve(sample.dim() + 1);
    row.push_back(std::to_string(sample.labels[i]));
    for (int j = 0; j < sample.dim(); ++j)
      row.push_back(format_value(sample.points(i, j)));
    rows.push_back(std::move(row));
  }
  write_csv(path, comments, header, rows);
}

}  // namespace dwt
