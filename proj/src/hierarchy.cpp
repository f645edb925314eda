#include "hierindex/hierarchy.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace hierindex {
namespace {

ClusterNode make_node(NodeId id, std::size_t level, const PointSet& doc_vectors, IndexList documents) {
  ClusterNode node;
  node.id = id;
  node.level = level;
  std::sort(documents.begin(), documents.end());
  node.documents = std::move(documents);
  node.gaussian = fit_gaussian(doc_vectors, node.documents);
  return node;
}

ClusterNode& add_parent(ClusterTree& tree, std::size_t level, const PointSet& doc_vectors,
                        std::vector<NodeId> children) {
  IndexList docs;
  for (const auto c : children) {
    const auto& d = tree.nodes[c].documents;
    docs.insert(docs.end(), d.begin(), d.end());
  }
  auto node = make_node(tree.nodes.size(), level, doc_vectors, std::move(docs));
  std::sort(children.begin(), children.end());
  node.children = std::move(children);
  tree.nodes.push_back(std::move(node));
  return tree.nodes.back();
}

}  // namespace

const ClusterNode& ClusterTree::node(NodeId id) const {
  if (id >= nodes.size()) throw Error("unknown node id " + std::to_string(id));
  return nodes[id];
}

std::vector<std::size_t> ClusterTree::level_counts() const {
  std::vector<std::size_t> counts(1, num_documents);
  for (const auto& n : nodes) {
    if (counts.size() <= n.level) counts.resize(n.level + 1, 0);
    ++counts[n.level];
  }
  return counts;
}

std::size_t ClusterTree::height() const {
  if (nodes.empty()) return 0;
  std::function<std::size_t(NodeId)> depth = [&](NodeId id) -> std::size_t {
    std::size_t best = 0;
    for (const auto c : nodes[id].children) best = std::max(best, depth(c));
    return best + 1;
  };
  return depth(root);
}

ClusterTree build_tree(const PointSet& doc_vectors, const TreeParams& params) {
  const auto n = static_cast<std::size_t>(doc_vectors.cols());
  if (n == 0) throw Error("build_tree: no documents");

  ClusterTree tree;
  tree.num_documents = n;
  FlatOptions flat{params.beta, params.min_split_size, params.split};

  const auto first = flat_cluster(doc_vectors, flat);
  std::vector<NodeId> current;
  for (const auto& cluster : first.clusters) {
    auto node = make_node(tree.nodes.size(), 1, doc_vectors, cluster);
    node.direct_documents = node.documents;
    current.push_back(node.id);
    tree.nodes.push_back(std::move(node));
  }

  std::size_t level = 1;
  while (current.size() > 1) {
    if (level >= params.max_levels) {
      throw Error("build_tree: hierarchy exceeded " + std::to_string(params.max_levels) + " levels");
    }
    PointSet reps(doc_vectors.rows(), static_cast<Eigen::Index>(current.size()));
    for (std::size_t i = 0; i < current.size(); ++i) {
      reps.col(static_cast<Eigen::Index>(i)) = tree.nodes[current[i]].representative();
    }
    const auto next_level = flat_cluster(reps, flat);
    ++level;
    if (next_level.clusters.size() == 1 || next_level.clusters.size() == current.size()) {
      if (next_level.clusters.size() > 1) {
        tree.notes.push_back("level " + std::to_string(level) + " did not merge any of " +
                             std::to_string(current.size()) + " clusters; closed with a root");
      }
      current = {add_parent(tree, level, doc_vectors, current).id};
      break;
    }
    std::vector<NodeId> next;
    for (const auto& cluster : next_level.clusters) {
      std::vector<NodeId> children;
      for (const auto i : cluster) children.push_back(current[i]);
      next.push_back(add_parent(tree, level, doc_vectors, std::move(children)).id);
    }
    current = std::move(next);
  }
  tree.root = current.front();
  return collapse_single_children(tree);
}

ClusterTree collapse_single_children(const ClusterTree& tree) {
  auto resolve = [&](NodeId id) {
    while (tree.node(id).children.size() == 1) id = tree.nodes[id].children.front();
    return id;
  };

  // Surviving nodes, reached from the resolved root.
  std::vector<char> keep(tree.nodes.size(), 0);
  std::vector<NodeId> stack{resolve(tree.root)};
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    keep[id] = 1;
    for (const auto c : tree.nodes[id].children) stack.push_back(resolve(c));
  }
  std::vector<NodeId> renumber(tree.nodes.size(), 0);
  NodeId next = 0;
  for (NodeId id = 0; id < tree.nodes.size(); ++id) {
    if (keep[id]) renumber[id] = next++;
  }

  ClusterTree out;
  out.num_documents = tree.num_documents;
  out.notes = tree.notes;
  out.root = renumber[resolve(tree.root)];
  out.nodes.reserve(next);
  for (NodeId id = 0; id < tree.nodes.size(); ++id) {
    if (!keep[id]) continue;
    ClusterNode node = tree.nodes[id];
    node.id = renumber[id];
    for (auto& c : node.children) c = renumber[resolve(c)];
    std::sort(node.children.begin(), node.children.end());
    out.nodes.push_back(std::move(node));
  }
  return out;
}

const IndexList& document_set(const ClusterTree& tree, NodeId node) { return tree.node(node).documents; }

std::vector<TermWeight> node_top_terms(const ClusterTree& tree, NodeId node, std::size_t m,
                                       const TfIdfMatrix& matrix, const Vocabulary& vocabulary) {
  Vector sums = Vector::Zero(matrix.weights.rows());
  for (const auto d : document_set(tree, node)) {
    for (SparseMatrix::InnerIterator it(matrix.weights, static_cast<Eigen::Index>(d)); it; ++it) {
      sums[it.row()] += it.value();
    }
  }
  std::vector<std::size_t> order;
  for (Eigen::Index t = 0; t < sums.size(); ++t) {
    if (sums[t] != 0.0) order.push_back(static_cast<std::size_t>(t));
  }
  const auto take = std::min(m, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double wa = sums[static_cast<Eigen::Index>(a)];
                      const double wb = sums[static_cast<Eigen::Index>(b)];
                      return wa != wb ? wa > wb : a < b;
                    });
  std::vector<TermWeight> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({vocabulary.terms[order[i]], sums[static_cast<Eigen::Index>(order[i])]});
  }
  return out;
}

}  // namespace hierindex
