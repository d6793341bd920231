#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace hdmean {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// n x p sample matrix; row k holds observation X_k'.
using DataMatrix = Eigen::MatrixXd;

// Invalid configuration or validation input detected before any real work
// starts. The CLI maps this to exit code 2; everything else maps to 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hdmean
