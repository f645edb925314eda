#pragma once

// Brute-force reference computations. Nothing here calls into the library
// routine it is used to check.

#include <vector>

#include "hierindex/common.hpp"

namespace hierindex::testing {

/// Minimum WCSS over all nontrivial 2-partitions (n <= 20).
double best_two_partition_wcss(const PointSet& points);

/// Minimum total Euclidean distance to the nearest of k medoids over all
/// k-subsets of the columns.
double best_medoid_cost(const PointSet& points, std::size_t k);

/// Inverse through the adjugate (cofactor expansion); k <= 5.
Eigen::MatrixXd adjugate_inverse(const Eigen::MatrixXd& m);
double cofactor_determinant(const Eigen::MatrixXd& m);

/// Fraction of points whose cluster maps to their class under the best
/// injective cluster -> class assignment (unmatched clusters count as wrong).
double permutation_agreement(const std::vector<std::size_t>& classes, const std::vector<std::size_t>& clusters);

/// Fraction of point pairs on which both labelings agree (same vs different).
double pairwise_agreement(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

/// Population covariance by the textbook double loop.
Eigen::MatrixXd naive_covariance(const PointSet& points);

}  // namespace hierindex::testing
