#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hierindex/common.hpp"
#include "hierindex/corpus.hpp"
#include "hierindex/divisive.hpp"
#include "hierindex/gaussmodel.hpp"

namespace hierindex {

struct TermWeight {
  std::string term;
  double weight = 0.0;
};

struct ClusterNode {
  NodeId id = 0;
  /// 1 for nodes clustering documents directly; documents themselves are level 0.
  std::size_t level = 1;
  std::vector<NodeId> children;
  /// Documents held directly (level-1 nodes only).
  IndexList direct_documents;
  /// Sorted transitive document set.
  IndexList documents;
  GaussianModel gaussian;
  std::vector<TermWeight> top_terms;

  bool is_leaf() const { return children.empty(); }
  const Vector& representative() const { return gaussian.centroid; }
};

struct TreeParams {
  double beta = 0.5;
  std::size_t min_split_size = 4;
  SplitOptions split;
  std::size_t max_levels = 32;
};

struct ClusterTree {
  NodeId root = 0;
  /// Indexed by NodeId; ids are dense.
  std::vector<ClusterNode> nodes;
  std::size_t num_documents = 0;
  /// Build diagnostics (forced roots and the like).
  std::vector<std::string> notes;

  const ClusterNode& node(NodeId id) const;
  /// Index 0 holds the document count, index L the number of level-L nodes.
  std::vector<std::size_t> level_counts() const;
  /// Longest root-to-leaf path, counted in nodes.
  std::size_t height() const;
};

/// Bottom-up construction: level 1 flat-clusters the documents, each further
/// level flat-clusters the previous level's centroids, until they no longer
/// split. Node Gaussians are fitted over each node's full document set.
/// Single-child nodes are collapsed before returning.
ClusterTree build_tree(const PointSet& doc_vectors, const TreeParams& params);

/// Replaces every internal node that has exactly one child by that child and
/// renumbers the surviving nodes densely in their previous id order.
ClusterTree collapse_single_children(const ClusterTree& tree);

/// The node's transitive document set (sorted document indices).
const IndexList& document_set(const ClusterTree& tree, NodeId node);

/// Top-m terms by tf-idf weight summed over the node's document set; zero
/// sums are omitted, ties go to the alphabetically first term.
std::vector<TermWeight> node_top_terms(const ClusterTree& tree, NodeId node, std::size_t m,
                                       const TfIdfMatrix& matrix, const Vocabulary& vocabulary);

}  // namespace hierindex
