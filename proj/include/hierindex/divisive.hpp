#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hierindex/common.hpp"
#include "hierindex/gaussmodel.hpp"

namespace hierindex {

struct SplitOptions {
  /// Power-iteration start vector seed.
  std::uint64_t seed = 42;
  /// Use the offset (sum_x x . v) / n over raw points instead of the mean
  /// absolute projection of the centered points.
  bool literal_offset = false;
  double power_tolerance = 1e-9;
  std::size_t power_max_iterations = 1000;
  std::size_t lloyd_max_iterations = 100;
};

/// Unit eigenvector of the largest eigenvalue of the population covariance of
/// points[:, members], by power iteration. Throws Error if all points coincide.
Vector principal_direction(const PointSet& points, std::span<const std::size_t> members,
                           const SplitOptions& options = {});

/// Two initial centroids straddling the cluster mean along its principal
/// direction. Precondition: at least two distinct points.
std::pair<Vector, Vector> pddp_init(const PointSet& points, std::span<const std::size_t> members,
                                    const SplitOptions& options = {});

struct SplitCandidate {
  IndexList parent;
  IndexList children[2];
  double parent_quality = 0.0;
  double child_qualities[2] = {0.0, 0.0};
  /// Within-cluster sum of squares after each Lloyd iteration.
  std::vector<double> wcss_trace;
  std::size_t iterations = 0;
  /// True when the last assignment pass changed nothing.
  bool converged = false;
};

/// Two-means Lloyd iterations (Euclidean) from the given centroids until the
/// assignment is stable or the iteration cap is hit; neither child is empty.
SplitCandidate binary_split(const PointSet& points, std::span<const std::size_t> members,
                            const std::pair<Vector, Vector>& init, const SplitOptions& options = {});

/// Stop splitting iff Q_parent <= beta * mean(Q_children), with infinite child
/// qualities excluded from the mean when the sibling is finite.
bool should_stop(double parent_quality, double left_quality, double right_quality, double beta);
bool should_stop(const SplitCandidate& candidate, double beta);

struct FlatClustering {
  std::vector<IndexList> clusters;
  /// Position in the input member list -> cluster index.
  std::vector<std::size_t> assignments;
};

struct FlatOptions {
  double beta = 0.5;
  std::size_t min_split_size = 4;
  SplitOptions split;
};

/// Leaves of the pruned divisive splitting tree over points[:, members], in
/// depth-first order (first child first).
FlatClustering flat_cluster(const PointSet& points, std::span<const std::size_t> members,
                            const FlatOptions& options);
FlatClustering flat_cluster(const PointSet& points, const FlatOptions& options);

/// Sum over clusters of squared Euclidean distances to the cluster mean.
double wcss(const PointSet& points, std::span<const IndexList> clusters);

bool all_identical(const PointSet& points, std::span<const std::size_t> members);

}  // namespace hierindex
