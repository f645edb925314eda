#include "hierindex/categorize.hpp"

#include <limits>

namespace hierindex {

CategorizationResult categorize(const ClusterTree& tree, const Eigen::Ref<const Vector>& query) {
  if (tree.nodes.empty()) throw Error("categorize: empty tree");
  CategorizationResult result;
  NodeId current = tree.root;
  double current_distance = mahalanobis(tree.node(current).gaussian, query);
  while (true) {
    const auto& node = tree.nodes[current];
    CategorizationStep step{current, current_distance, std::nullopt, 0.0};
    if (node.is_leaf()) {
      result.path.push_back(step);
      break;
    }
    double best = std::numeric_limits<double>::infinity();
    NodeId best_id = node.children.front();
    for (const auto c : node.children) {  // children are sorted by id
      const double d = mahalanobis(tree.nodes[c].gaussian, query);
      if (d < best) {
        best = d;
        best_id = c;
      }
    }
    step.best_child = best_id;
    step.best_child_distance = best;
    result.path.push_back(step);
    if (!(best < current_distance)) break;
    current = best_id;
    current_distance = best;
  }
  result.node = result.path.back().node;
  return result;
}

}  // namespace hierindex
