#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace dwt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Bad or inadequate input data (missing file, malformed CSV, too few rows...).
struct data_error : std::runtime_error {
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical degeneracy (singular solves, non-generic point clouds...).
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dwt
