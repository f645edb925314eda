#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hierindex {

/// Raised for unrecoverable input or invariant violations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column-major k x n matrix, one semantic-space point per column.
using PointSet = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Indices into a PointSet.
using IndexList = std::vector<std::size_t>;

using NodeId = std::size_t;

}  // namespace hierindex
