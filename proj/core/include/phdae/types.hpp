#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace phdae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Malformed input: wrong shapes, bad intervals, unparsable documents.
/// The CLI maps this class to exit code 2.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Mathematical failure: singular factors, violated rank assumptions,
/// inconsistent initial data. The CLI maps this class to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace phdae
