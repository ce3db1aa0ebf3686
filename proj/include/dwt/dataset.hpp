#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dwt/common.hpp"

namespace dwt {

// Two-sample data: n points in R^D with binary group labels.
struct LabeledSample {
  Matrix points;            // n x D
  std::vector<int> labels;  // 1 (group X) or 0 (group Y)
  int n1 = 0;
  int n0 = 0;

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

struct CsvOptions {
  std::string label_column;                 // header name, or a 0-based index
  std::optional<std::string> group1_value;  // which label value maps to 1
};

// Loads a labeled sample from CSV. The label column may hold any two distinct
// values; the lexicographically smaller one becomes group 1 unless
// group1_value overrides that.
LabeledSample load_csv(const std::string& path, const CsvOptions& opts);

// Both groups i.i.d. N(0, I_d). Group-1 rows come first.
LabeledSample gen_gaussian_null(int n1, int n0, int d, std::uint64_t seed);

// Group 1 ~ N(0, I_d); group 0 ~ N(delta, I_d) with delta drawn uniformly
// from the radius-`radius` sphere (one draw per call).
LabeledSample gen_gaussian_location(int n1, int n0, int d, double radius,
                                    std::uint64_t seed);

// Covariance difference: group 1 has sd `scale` on the first d/2 coordinates,
// group 0 on the last d/2. Requires even d.
LabeledSample gen_gaussian_direction(int n1, int n0, int d, double scale,
                                     std::uint64_t seed);

// Shift radius used by the location scenario when none is given.
inline double default_location_radius(int d) { return d >= 50 ? 1.0 : 0.8; }
inline constexpr double kDefaultDirectionScale = 1.25;

// Gray-scale template image; distorted copies of it form the image manifold.
struct ImageTemplate {
  Matrix pixels;  // values in [0,255], row 0 = top of the image
  int pad = 6;    // zero border added before distortion

  int side() const { return static_cast<int>(pixels.rows()) + 2 * pad; }
  Matrix padded() const;
};

// Built-in smooth 28x28 glyph (integer gray levels, zero at the borders).
ImageTemplate default_image_template();

// Template from a CSV of pixel rows (no header); values clamped to [0,255].
ImageTemplate load_image_template_csv(const std::string& path, int pad = 6);

// Rotates the padded template by theta (radians, counter-clockwise) and
// shifts it by (h, v) in pixel units (x right, y up), resampling with
// bilinear interpolation, zero fill outside the canvas, and rounding back to
// integer gray levels. Returns the image flattened by rows.
Vector render_distorted(const ImageTemplate& tpl, double theta, double h,
                        double v);

enum class ImageScenario { Null, Location, Direction };

// `count` distorted images for one group (1 or 0) of the given scenario, as a
// count x side^2 matrix of flattened rows. Deterministic in all arguments.
Matrix gen_image_manifold(const ImageTemplate& tpl, ImageScenario scenario,
                          int group, int count, std::uint64_t seed);

// Convenience: both groups stacked (group 1 first) with labels.
LabeledSample gen_image_sample(const ImageTemplate& tpl, ImageScenario scenario,
                               int n1, int n0, std::uint64_t seed);

void write_sample_csv(const std::string& path, const LabeledSample& sample,
                      const std::vector<std::string>& comments);

}  // namespace dwt
