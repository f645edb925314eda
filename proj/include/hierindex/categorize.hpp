#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hierindex/common.hpp"
#include "hierindex/hierarchy.hpp"

namespace hierindex {

struct CategorizationStep {
  NodeId node = 0;
  /// Mahalanobis distance of the query to this node.
  double distance = 0.0;
  /// Closest child and its distance; absent at a leaf.
  std::optional<NodeId> best_child;
  double best_child_distance = 0.0;
};

struct CategorizationResult {
  NodeId node = 0;
  /// Root first, target last.
  std::vector<CategorizationStep> path;
  std::vector<std::string> warnings;
};

/// Tree search from the root: at each internal node move to the child of least
/// Mahalanobis distance (lowest id on ties) if it is strictly closer than the
/// node itself, otherwise stop there. Throws Error on a dimension mismatch.
CategorizationResult categorize(const ClusterTree& tree, const Eigen::Ref<const Vector>& query);

}  // namespace hierindex
