#include "hierindex/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "hierindex/categorize.hpp"
#include "hierindex/kernels.hpp"

namespace hierindex {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

IndexList iota_list(std::size_t n) {
  IndexList idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

FlatClustering from_labels(const std::vector<std::size_t>& labels, std::size_t k) {
  FlatClustering out;
  out.clusters.resize(k);
  out.assignments = labels;
  for (std::size_t i = 0; i < labels.size(); ++i) out.clusters[labels[i]].push_back(i);
  return out;
}

double partition_cost(const PointSet& points, const std::vector<std::size_t>& labels, const PointSet& centers) {
  double cost = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    cost += (points.col(static_cast<Eigen::Index>(i)) - centers.col(static_cast<Eigen::Index>(labels[i]))).squaredNorm();
  }
  return cost;
}

// Cluster means; empty clusters keep their previous center.
void update_centers(const PointSet& points, const std::vector<std::size_t>& labels, PointSet& centers) {
  PointSet sums = PointSet::Zero(centers.rows(), centers.cols());
  std::vector<std::size_t> counts(static_cast<std::size_t>(centers.cols()), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sums.col(static_cast<Eigen::Index>(labels[i])) += points.col(static_cast<Eigen::Index>(i));
    ++counts[labels[i]];
  }
  for (Eigen::Index c = 0; c < centers.cols(); ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) centers.col(c) = sums.col(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }
}

// Moves the worst-fitting point of a multi-member cluster into each empty one.
bool fill_empty(const PointSet& points, std::vector<std::size_t>& labels, const PointSet& centers, std::size_t k) {
  bool moved = false;
  while (true) {
    std::vector<std::size_t> counts(k, 0);
    for (const auto l : labels) ++counts[l];
    const auto empty = std::find(counts.begin(), counts.end(), 0);
    if (empty == counts.end()) return moved;
    std::size_t worst = labels.size();
    double worst_d = -1.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (counts[labels[i]] < 2) continue;
      const double d = (points.col(static_cast<Eigen::Index>(i)) - centers.col(static_cast<Eigen::Index>(labels[i]))).squaredNorm();
      if (d > worst_d) {
        worst_d = d;
        worst = i;
      }
    }
    if (worst == labels.size()) return moved;
    labels[worst] = static_cast<std::size_t>(empty - counts.begin());
    moved = true;
  }
}

struct LloydRun {
  std::vector<std::size_t> labels;
  double cost = 0.0;
  std::vector<double> trace;
};

LloydRun lloyd(const PointSet& points, PointSet centers, std::size_t max_iterations) {
  const auto n = static_cast<std::size_t>(points.cols());
  const auto k = static_cast<std::size_t>(centers.cols());
  const auto all = iota_list(n);
  LloydRun run;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    auto labels = kernels::assign_nearest(points, all, centers).labels;
    const bool changed = it == 0 || labels != run.labels;
    run.labels = std::move(labels);
    update_centers(points, run.labels, centers);
    if (fill_empty(points, run.labels, centers, k)) update_centers(points, run.labels, centers);
    run.trace.push_back(partition_cost(points, run.labels, centers));
    if (!changed) break;
  }
  run.cost = run.trace.back();
  return run;
}

PointSet kmeanspp_seed(const PointSet& points, std::size_t k, std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(points.cols());
  PointSet centers(points.rows(), static_cast<Eigen::Index>(k));
  std::vector<char> chosen(n, 0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t first = pick(rng);
  chosen[first] = 1;
  centers.col(0) = points.col(static_cast<Eigen::Index>(first));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = (points.col(static_cast<Eigen::Index>(i)) - centers.col(0)).squaredNorm();
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t next = n;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        next = i;
        target -= d2[i];
        if (target < 0.0) break;
      }
    }
    if (next == n) next = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), 0) - chosen.begin());
    chosen[next] = 1;
    centers.col(static_cast<Eigen::Index>(c)) = points.col(static_cast<Eigen::Index>(next));
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points.col(static_cast<Eigen::Index>(i)) - centers.col(static_cast<Eigen::Index>(c))).squaredNorm());
    }
  }
  return centers;
}

}  // namespace

ContingencyTable contingency(const std::vector<std::size_t>& classes, const std::vector<std::size_t>& clusters) {
  if (classes.size() != clusters.size()) throw Error("contingency: class and cluster lists differ in length");
  const std::size_t nc = classes.empty() ? 0 : *std::max_element(classes.begin(), classes.end()) + 1;
  const std::size_t nk = clusters.empty() ? 0 : *std::max_element(clusters.begin(), clusters.end()) + 1;
  ContingencyTable t;
  t.counts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nc), static_cast<Eigen::Index>(nk));
  for (std::size_t i = 0; i < classes.size(); ++i) {
    t.counts(static_cast<Eigen::Index>(classes[i]), static_cast<Eigen::Index>(clusters[i])) += 1.0;
  }
  t.class_totals = t.counts.rowwise().sum();
  t.cluster_totals = t.counts.colwise().sum().transpose();
  t.total = t.counts.sum();
  return t;
}

ContingencyTable contingency(const std::vector<IndexList>& clusters, const std::vector<std::optional<std::size_t>>& class_of) {
  std::size_t nc = 0;
  for (const auto& c : class_of) {
    if (c) nc = std::max(nc, *c + 1);
  }
  ContingencyTable t;
  t.counts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nc), static_cast<Eigen::Index>(clusters.size()));
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    for (const auto d : clusters[j]) {
      if (d < class_of.size() && class_of[d]) t.counts(static_cast<Eigen::Index>(*class_of[d]), static_cast<Eigen::Index>(j)) += 1.0;
    }
  }
  t.class_totals = t.counts.rowwise().sum();
  t.cluster_totals = t.counts.colwise().sum().transpose();
  t.total = t.counts.sum();
  return t;
}

double f_measure(const ContingencyTable& table) {
  if (!(table.total > 0.0)) throw Error("f_measure: empty contingency table");
  double overall = 0.0;
  for (Eigen::Index i = 0; i < table.counts.rows(); ++i) {
    const double ni = table.class_totals[i];
    if (ni <= 0.0) continue;
    double best = 0.0;
    for (Eigen::Index j = 0; j < table.counts.cols(); ++j) {
      const double nij = table.counts(i, j);
      const double nj = table.cluster_totals[j];
      if (nij <= 0.0 || nj <= 0.0) continue;
      const double p = nij / nj;
      const double r = nij / ni;
      best = std::max(best, 2.0 * p * r / (p + r));
    }
    overall += ni / table.total * best;
  }
  return overall;
}

KMeansResult kmeans_baseline(const PointSet& points, std::size_t k, std::uint64_t seed, std::size_t restarts,
                             std::size_t max_iterations) {
  const auto n = static_cast<std::size_t>(points.cols());
  if (k == 0 || k > n) throw Error("kmeans_baseline: need 1 <= k <= n");
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    auto run = lloyd(points, kmeanspp_seed(points, k, rng), max_iterations);
    if (run.cost < best.wcss) {
      best.wcss = run.cost;
      best.wcss_trace = std::move(run.trace);
      best.clustering = from_labels(run.labels, k);
    }
  }
  return best;
}

double medoid_cost(const Eigen::MatrixXd& distances, const IndexList& medoids) {
  double cost = 0.0;
  for (Eigen::Index o = 0; o < distances.rows(); ++o) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto m : medoids) best = std::min(best, distances(o, static_cast<Eigen::Index>(m)));
    cost += best;
  }
  return cost;
}

namespace {

// Greedy BUILD: repeatedly add the point that lowers the total cost the most.
IndexList pam_build(const Eigen::MatrixXd& dist, std::size_t k) {
  const auto n = static_cast<std::size_t>(dist.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<char> is_medoid(n, 0);
  std::vector<double> nearest(n, kInf);
  IndexList medoids;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t pick = n;
    double best_gain = -1.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      double gain = 0.0;
      for (std::size_t o = 0; o < n; ++o) {
        const double d = dist(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(c));
        if (std::isinf(nearest[o])) {
          gain -= d;
        } else if (d < nearest[o]) {
          gain += nearest[o] - d;
        }
      }
      if (pick == n || gain > best_gain) {
        best_gain = gain;
        pick = c;
      }
    }
    is_medoid[pick] = 1;
    medoids.push_back(pick);
    for (std::size_t o = 0; o < n; ++o) {
      nearest[o] = std::min(nearest[o], dist(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(pick)));
    }
  }
  return medoids;
}

// SWAP: per pass, evaluate all (medoid, non-medoid) exchanges with shared
// per-point bookkeeping of the nearest and second-nearest medoid, and apply
// the best one.
KMedoidsResult pam_swap(const Eigen::MatrixXd& dist, IndexList medoids, std::size_t max_swaps) {
  const auto n = static_cast<std::size_t>(dist.cols());
  const auto k = medoids.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  KMedoidsResult out;
  out.medoids = std::move(medoids);
  std::vector<char> is_medoid(n, 0);
  for (const auto m : out.medoids) is_medoid[m] = 1;

  std::vector<std::size_t> near_idx(n);
  std::vector<double> d1(n), d2(n);
  auto refresh = [&] {
    for (std::size_t o = 0; o < n; ++o) {
      d1[o] = d2[o] = kInf;
      near_idx[o] = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const double d = dist(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(out.medoids[i]));
        if (d < d1[o]) {
          d2[o] = d1[o];
          d1[o] = d;
          near_idx[o] = i;
        } else if (d < d2[o]) {
          d2[o] = d;
        }
      }
    }
  };
  refresh();
  out.cost = std::accumulate(d1.begin(), d1.end(), 0.0);
  while (out.swaps < max_swaps && k < n) {
    std::vector<double> removal(k, 0.0);
    if (k > 1) {
      for (std::size_t o = 0; o < n; ++o) removal[near_idx[o]] += d2[o] - d1[o];
    }
    double best_delta = 0.0;
    std::size_t best_i = k, best_c = n;
    std::vector<double> delta(k);
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      if (k == 1) {
        const double d = dist.col(static_cast<Eigen::Index>(c)).sum() - out.cost;
        if (d < best_delta) {
          best_delta = d;
          best_i = 0;
          best_c = c;
        }
        continue;
      }
      double shared = 0.0;
      std::copy(removal.begin(), removal.end(), delta.begin());
      for (std::size_t o = 0; o < n; ++o) {
        const double doc = dist(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(c));
        if (doc < d1[o]) {
          shared += doc - d1[o];
          delta[near_idx[o]] += d1[o] - d2[o];
        } else if (doc < d2[o]) {
          delta[near_idx[o]] += doc - d2[o];
        }
      }
      for (std::size_t i = 0; i < k; ++i) {
        if (delta[i] + shared < best_delta) {
          best_delta = delta[i] + shared;
          best_i = i;
          best_c = c;
        }
      }
    }
    if (best_c == n || best_delta > -1e-12 * std::max(1.0, out.cost)) break;
    is_medoid[out.medoids[best_i]] = 0;
    is_medoid[best_c] = 1;
    out.medoids[best_i] = best_c;
    ++out.swaps;
    refresh();
    out.cost = std::accumulate(d1.begin(), d1.end(), 0.0);
  }

  std::vector<std::size_t> labels(near_idx);
  for (std::size_t i = 0; i < k; ++i) labels[out.medoids[i]] = i;
  out.clustering = from_labels(labels, k);
  return out;
}

}  // namespace

KMedoidsResult kmedoids_baseline(const PointSet& points, std::size_t k, std::uint64_t seed, std::size_t restarts,
                                 std::size_t max_swaps) {
  const auto n = static_cast<std::size_t>(points.cols());
  if (k == 0 || k > n) throw Error("kmedoids_baseline: need 1 <= k <= n");
  const Eigen::MatrixXd dist = kernels::pairwise_distances(points);

  // First start from BUILD, further starts from seeded random medoid sets.
  KMedoidsResult best = pam_swap(dist, pam_build(dist, k), max_swaps);
  std::mt19937_64 rng(seed);
  IndexList pool = iota_list(n);
  for (std::size_t r = 1; r < restarts && k < n; ++r) {
    std::shuffle(pool.begin(), pool.end(), rng);
    auto run = pam_swap(dist, IndexList(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k)), max_swaps);
    if (run.cost < best.cost) best = std::move(run);
  }
  return best;
}

AccuracyReport accuracy_protocol(const ClusterTree& tree, const PointSet& train_vectors, const PointSet& test_vectors) {
  AccuracyReport report;
  report.total = static_cast<std::size_t>(test_vectors.cols());
  if (report.total == 0) return report;
  const auto nearest = kernels::cosine_argmax(test_vectors, train_vectors);
  std::size_t correct = 0;
#pragma omp parallel for reduction(+ : correct) schedule(dynamic, 8)
  for (Eigen::Index t = 0; t < test_vectors.cols(); ++t) {
    const auto result = categorize(tree, test_vectors.col(t));
    const auto& docs = document_set(tree, result.node);
    if (std::binary_search(docs.begin(), docs.end(), nearest[static_cast<std::size_t>(t)])) ++correct;
  }
  report.correct = correct;
  report.percent = 100.0 * static_cast<double>(correct) / static_cast<double>(report.total);
  return report;
}

std::vector<std::optional<std::size_t>> class_ids(const std::vector<std::optional<std::string>>& labels,
                                                  std::vector<std::string>* names) {
  std::map<std::string, std::size_t> ids;
  for (const auto& l : labels) {
    if (l) ids.emplace(*l, 0);
  }
  std::size_t next = 0;
  for (auto& [name, id] : ids) {
    id = next++;
    if (names) names->push_back(name);
  }
  std::vector<std::optional<std::size_t>> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(l ? std::optional<std::size_t>(ids.at(*l)) : std::nullopt);
  return out;
}

std::vector<IndexList> level1_partition(const ClusterTree& tree) {
  std::vector<IndexList> out;
  for (const auto& node : tree.nodes) {
    if (node.is_leaf()) out.push_back(node.documents);
  }
  return out;
}

double tree_f_measure(const ClusterTree& tree, const std::vector<std::optional<std::size_t>>& class_of) {
  std::vector<IndexList> all;
  for (const auto& node : tree.nodes) all.push_back(node.documents);
  // Nodes overlap, so class sizes come from the root rather than row sums.
  auto table = contingency(all, class_of);
  table.class_totals = table.counts.col(static_cast<Eigen::Index>(tree.root));
  table.total = table.class_totals.sum();
  return f_measure(table);
}

PointSet embed_documents(const HierIndex& index, const std::vector<RawDocument>& docs) {
  PointSet out(static_cast<Eigen::Index>(index.lsi.k), static_cast<Eigen::Index>(docs.size()));
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(docs.size()); ++i) {
    out.col(i) = embed_text(index, docs[static_cast<std::size_t>(i)].text);
  }
  return out;
}

std::vector<SweepRow> sweep(const std::vector<RawDocument>& train, const std::vector<RawDocument>& test,
                            const SweepConfig& config) {
  std::vector<SweepRow> rows;
  std::vector<std::optional<std::string>> labels;
  for (const auto& d : train) labels.push_back(d.label);
  const auto class_of = class_ids(labels);
  const bool labeled = std::any_of(class_of.begin(), class_of.end(), [](const auto& c) { return c.has_value(); });

  std::optional<CorpusMatrix> corpus;
  std::string corpus_error;
  try {
    corpus = build_matrix(train, config.base.preprocess);
  } catch (const Error& e) {
    corpus_error = e.what();
  }

  for (const auto topics : config.topics) {
    std::optional<LsiFit> fit;
    std::string fit_error = corpus_error;
    if (corpus) {
      try {
        fit = fit_lsi(corpus->matrix, topics, config.base.svd);
        fit->model.vocabulary_fingerprint = vocabulary_fingerprint(corpus->vocabulary);
        if (config.base.normalize) {
          for (Eigen::Index c = 0; c < fit->doc_vectors.cols(); ++c) {
            if (fit->doc_vectors.col(c).norm() > 0.0) fit->doc_vectors.col(c).normalize();
          }
        }
      } catch (const Error& e) {
        fit_error = e.what();
      }
    }
    PointSet test_vectors;
    if (fit && !test.empty()) {
      HierIndex probe;
      probe.config = config.base;
      probe.vocabulary = corpus->vocabulary;
      probe.idf = corpus->matrix.idf;
      probe.lsi = fit->model;
      test_vectors = embed_documents(probe, test);
    }
    for (const auto beta : config.betas) {
      SweepRow row;
      row.topics = topics;
      row.beta = beta;
      row.f_measure = row.tree_f_measure = row.accuracy = kNaN;
      if (!fit) {
        row.ok = false;
        row.error = fit_error;
        rows.push_back(row);
        continue;
      }
      try {
        TreeParams params = config.base.tree;
        params.beta = beta;
        const auto tree = build_tree(fit->doc_vectors, params);
        const auto counts = tree.level_counts();
        row.num_clusters = tree.nodes.size();
        row.levels = counts.size() - 1;
        row.level1_clusters = level1_partition(tree).size();
        if (labeled) {
          row.f_measure = f_measure(contingency(level1_partition(tree), class_of));
          row.tree_f_measure = tree_f_measure(tree, class_of);
        }
        if (test_vectors.cols() > 0) row.accuracy = accuracy_protocol(tree, fit->doc_vectors, test_vectors).percent;
      } catch (const Error& e) {
        row.ok = false;
        row.error = e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string sweep_csv_header() {
  return "topics,beta,num_clusters,levels,level1_clusters,f_measure,tree_f_measure,accuracy,status";
}

std::string sweep_csv_row(const SweepRow& row) {
  auto num = [](double v) { return std::isnan(v) ? std::string() : fmt::format("{:.6g}", v); };
  std::string status = row.ok ? "ok" : "failed: " + row.error;
  std::replace(status.begin(), status.end(), ',', ';');
  std::replace(status.begin(), status.end(), '\n', ' ');
  return fmt::format("{},{},{},{},{},{},{},{},{}", row.topics, num(row.beta), row.num_clusters, row.levels,
                     row.level1_clusters, num(row.f_measure), num(row.tree_f_measure), num(row.accuracy), status);
}

}  // namespace hierindex
