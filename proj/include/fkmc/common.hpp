#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fkmc {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXr = Eigen::VectorXd;
using MatrixXr = Eigen::MatrixXd;

inline constexpr Complex kI{0.0, 1.0};

// Bad arguments to an operation (dimension mismatch, contraction bound violated, ...).
struct InputError : std::invalid_argument {
  explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Invalid model / run configuration detected before any compute.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite intermediate value; carries the offending grid node (or -1).
struct NumericalError : std::runtime_error {
  int node_index;
  NumericalError(const std::string& msg, int node = -1)
      : std::runtime_error(msg + (node >= 0 ? " at node " + std::to_string(node) : "")),
        node_index(node) {}
};

}  // namespace fkmc
