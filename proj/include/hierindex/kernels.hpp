#pragma once

// Data-parallel inner loops. Every kernel exists twice with the same
// signature: `serial::` is the plain reference loop, `parallel::` the OpenMP
// version. Each output element is computed by the same instruction sequence in
// both, so results are bit-identical; the tests rely on that.

#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "hierindex/common.hpp"

namespace hierindex::kernels {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

struct Assignment {
  std::vector<std::size_t> labels;
  /// Squared Euclidean distance to the assigned center.
  Vector sq_distances;
};

namespace serial {
/// m^T * x for column-major sparse m (r x c) and dense x (r x l); result is c x l.
Eigen::MatrixXd transpose_times(const SparseMatrix& m, const Eigen::MatrixXd& x);
/// Nearest center (squared Euclidean, lowest index on ties) for points[:, members].
Assignment assign_nearest(const PointSet& points, std::span<const std::size_t> members,
                          const PointSet& centers);
/// Per query column, the reference column of maximal cosine similarity. Ties,
/// and zero-norm vectors (similarity 0), resolve to the lowest reference index.
std::vector<std::size_t> cosine_argmax(const PointSet& queries, const PointSet& references);
/// Symmetric n x n Euclidean distances between columns.
Eigen::MatrixXd pairwise_distances(const PointSet& points);
/// Population covariance of points[:, members] about `mean`.
Eigen::MatrixXd covariance(const PointSet& points, std::span<const std::size_t> members,
                           const Vector& mean);
}  // namespace serial

namespace parallel {
/// m^T * x for column-major sparse m (r x c) and dense x (r x l); result is c x l.
Eigen::MatrixXd transpose_times(const SparseMatrix& m, const Eigen::MatrixXd& x);
/// Nearest center (squared Euclidean, lowest index on ties) for points[:, members].
Assignment assign_nearest(const PointSet& points, std::span<const std::size_t> members,
                          const PointSet& centers);
/// Per query column, the reference column of maximal cosine similarity. Ties,
/// and zero-norm vectors (similarity 0), resolve to the lowest reference index.
std::vector<std::size_t> cosine_argmax(const PointSet& queries, const PointSet& references);
/// Symmetric n x n Euclidean distances between columns.
Eigen::MatrixXd pairwise_distances(const PointSet& points);
/// Population covariance of points[:, members] about `mean`.
Eigen::MatrixXd covariance(const PointSet& points, std::span<const std::size_t> members,
                           const Vector& mean);
}  // namespace parallel

using parallel::assign_nearest;
using parallel::cosine_argmax;
using parallel::covariance;
using parallel::pairwise_distances;
using parallel::transpose_times;

}  // namespace hierindex::kernels
