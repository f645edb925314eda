#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hierindex/common.hpp"
#include "hierindex/corpus.hpp"
#include "hierindex/divisive.hpp"
#include "hierindex/hierarchy.hpp"
#include "hierindex/index.hpp"

namespace hierindex {

/// Class x cluster document counts.
struct ContingencyTable {
  Eigen::MatrixXd counts;
  Vector class_totals;
  Vector cluster_totals;
  double total = 0.0;
};

/// `classes[i]` and `clusters[i]` are the class and cluster of item i.
ContingencyTable contingency(const std::vector<std::size_t>& classes, const std::vector<std::size_t>& clusters);

/// Clusters given as member lists; items missing from `class_of` are ignored.
ContingencyTable contingency(const std::vector<IndexList>& clusters, const std::vector<std::optional<std::size_t>>& class_of);

/// Class-size-weighted best-match F: sum_i (n_i / N) * max_j 2PR / (P + R)
/// with P = n_ij / n_j and R = n_ij / n_i.
double f_measure(const ContingencyTable& table);

/// Lloyd iterations from k-means++ seeding, best of `restarts` runs by WCSS.
struct KMeansResult {
  FlatClustering clustering;
  double wcss = 0.0;
  /// WCSS after each iteration of the kept run.
  std::vector<double> wcss_trace;
};
KMeansResult kmeans_baseline(const PointSet& points, std::size_t k, std::uint64_t seed, std::size_t restarts = 10,
                             std::size_t max_iterations = 100);

/// Partitioning Around Medoids on Euclidean distance: the best improving swap
/// per pass until none improves or `max_swaps` is hit. The first run starts
/// from greedy BUILD, the remaining `restarts - 1` from seeded random medoid
/// sets; the lowest-cost run is kept.
struct KMedoidsResult {
  FlatClustering clustering;
  /// Column indices of the medoids, in cluster order.
  IndexList medoids;
  double cost = 0.0;
  /// Swaps applied in the kept run.
  std::size_t swaps = 0;
};
KMedoidsResult kmedoids_baseline(const PointSet& points, std::size_t k, std::uint64_t seed, std::size_t restarts = 10,
                                 std::size_t max_swaps = 200);

/// Total distance of every point to its nearest medoid.
double medoid_cost(const Eigen::MatrixXd& distances, const IndexList& medoids);

struct AccuracyReport {
  double percent = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

/// For each test vector d: d' is the training vector of highest cosine
/// similarity (lowest index on ties); d counts as correct when d' belongs to
/// the document set of the node that d categorizes to.
AccuracyReport accuracy_protocol(const ClusterTree& tree, const PointSet& train_vectors, const PointSet& test_vectors);

struct SweepRow {
  std::size_t topics = 0;
  double beta = 0.0;
  std::size_t num_clusters = 0;
  std::size_t levels = 0;
  std::size_t level1_clusters = 0;
  /// Level-1 partition against class labels; NaN when unlabeled.
  double f_measure = 0.0;
  /// Best-matching node over the whole tree per class; NaN when unlabeled.
  double tree_f_measure = 0.0;
  /// NaN without a test set.
  double accuracy = 0.0;
  bool ok = true;
  std::string error;
};

struct SweepConfig {
  std::vector<std::size_t> topics;
  std::vector<double> betas;
  BuildConfig base;
};

/// One index per (topics, beta) pair over `train`; `test` (may be empty) feeds
/// the accuracy column. A failing cell is reported and the sweep continues.
std::vector<SweepRow> sweep(const std::vector<RawDocument>& train, const std::vector<RawDocument>& test,
                            const SweepConfig& config);

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);

/// Class ids for documents by label (sorted label order); unlabeled -> nullopt.
std::vector<std::optional<std::size_t>> class_ids(const std::vector<std::optional<std::string>>& labels,
                                                  std::vector<std::string>* names = nullptr);

/// Level-1 clusters of a tree as document member lists.
std::vector<IndexList> level1_partition(const ClusterTree& tree);

/// Hierarchical F: every node of the tree is a candidate cluster.
double tree_f_measure(const ClusterTree& tree, const std::vector<std::optional<std::size_t>>& class_of);

/// Test documents folded into an existing index's semantic space.
PointSet embed_documents(const HierIndex& index, const std::vector<RawDocument>& docs);

}  // namespace hierindex
