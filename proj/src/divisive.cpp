#include "hierindex/divisive.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "hierindex/kernels.hpp"

namespace hierindex {
namespace {

Vector mean_of(const PointSet& points, std::span<const std::size_t> members) {
  Vector mu = Vector::Zero(points.rows());
  for (const auto p : members) mu += points.col(static_cast<Eigen::Index>(p));
  return mu / static_cast<double>(members.size());
}

IndexList iota_list(std::size_t n) {
  IndexList idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

bool all_identical(const PointSet& points, std::span<const std::size_t> members) {
  if (members.empty()) return true;
  const auto first = points.col(static_cast<Eigen::Index>(members.front()));
  for (const auto p : members) {
    if (points.col(static_cast<Eigen::Index>(p)) != first) return false;
  }
  return true;
}

double wcss(const PointSet& points, std::span<const IndexList> clusters) {
  double total = 0.0;
  for (const auto& c : clusters) {
    if (c.empty()) continue;
    const Vector mu = mean_of(points, c);
    for (const auto p : c) total += (points.col(static_cast<Eigen::Index>(p)) - mu).squaredNorm();
  }
  return total;
}

Vector principal_direction(const PointSet& points, std::span<const std::size_t> members,
                           const SplitOptions& options) {
  if (members.size() < 2 || all_identical(points, members)) {
    throw Error("principal_direction: needs at least two distinct points");
  }
  const Vector mu = mean_of(points, members);
  const Eigen::MatrixXd cov = kernels::covariance(points, members, mu);

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(points.rows());
  for (auto& x : v) x = gauss(rng);
  v.normalize();

  for (std::size_t it = 0; it < options.power_max_iterations; ++it) {
    Vector next = cov * v;
    const double norm = next.norm();
    if (!(norm > 0.0)) throw Error("principal_direction: start vector annihilated by covariance");
    next /= norm;
    const double change = (next - v).norm();
    v = std::move(next);
    if (change < options.power_tolerance) break;
  }
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0.0) v = -v;
  return v;
}

std::pair<Vector, Vector> pddp_init(const PointSet& points, std::span<const std::size_t> members,
                                    const SplitOptions& options) {
  const Vector v = principal_direction(points, members, options);
  const Vector mu = mean_of(points, members);
  double offset = 0.0;
  for (const auto p : members) {
    const auto x = points.col(static_cast<Eigen::Index>(p));
    offset += options.literal_offset ? x.dot(v) : std::abs((x - mu).dot(v));
  }
  offset /= static_cast<double>(members.size());
  return {mu + offset * v, mu - offset * v};
}

SplitCandidate binary_split(const PointSet& points, std::span<const std::size_t> members,
                            const std::pair<Vector, Vector>& init, const SplitOptions& options) {
  if (members.size() < 2) throw Error("binary_split: needs at least two points");
  SplitCandidate out;
  out.parent.assign(members.begin(), members.end());

  PointSet centers(points.rows(), 2);
  centers.col(0) = init.first;
  centers.col(1) = init.second;
  std::vector<std::size_t> labels;
  for (std::size_t it = 1; it <= options.lloyd_max_iterations; ++it) {
    auto assignment = kernels::assign_nearest(points, members, centers);
    const bool changed = it == 1 || assignment.labels != labels;
    labels = std::move(assignment.labels);

    Vector sums[2] = {Vector::Zero(points.rows()), Vector::Zero(points.rows())};
    std::size_t counts[2] = {0, 0};
    for (std::size_t i = 0; i < members.size(); ++i) {
      sums[labels[i]] += points.col(static_cast<Eigen::Index>(members[i]));
      ++counts[labels[i]];
    }
    double cost = 0.0;
    for (int side = 0; side < 2; ++side) {
      if (counts[side] > 0) centers.col(side) = sums[side] / static_cast<double>(counts[side]);
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      cost += (points.col(static_cast<Eigen::Index>(members[i])) - centers.col(static_cast<Eigen::Index>(labels[i])))
                  .squaredNorm();
    }
    out.wcss_trace.push_back(cost);
    out.iterations = it;
    if (!changed) {
      out.converged = true;
      break;
    }
  }

  for (std::size_t i = 0; i < members.size(); ++i) out.children[labels[i]].push_back(members[i]);
  for (int side = 0; side < 2; ++side) {
    auto& empty = out.children[side];
    auto& full = out.children[1 - side];
    if (!empty.empty()) continue;
    const Vector mu = mean_of(points, full);
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < full.size(); ++i) {
      const double d = (points.col(static_cast<Eigen::Index>(full[i])) - mu).squaredNorm();
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    empty.push_back(full[far]);
    full.erase(full.begin() + static_cast<std::ptrdiff_t>(far));
  }

  out.parent_quality = cluster_quality(fit_gaussian(points, members), points, members);
  for (int side = 0; side < 2; ++side) {
    const auto& c = out.children[side];
    out.child_qualities[side] = cluster_quality(fit_gaussian(points, c), points, c);
  }
  return out;
}

bool should_stop(double parent_quality, double left_quality, double right_quality, double beta) {
  if (std::isinf(parent_quality)) return true;
  const bool left_inf = std::isinf(left_quality);
  const bool right_inf = std::isinf(right_quality);
  if (left_inf && right_inf) return true;
  double mean = 0.0;
  if (left_inf) {
    mean = right_quality;
  } else if (right_inf) {
    mean = left_quality;
  } else {
    mean = 0.5 * (left_quality + right_quality);
  }
  return parent_quality <= beta * mean;
}

bool should_stop(const SplitCandidate& candidate, double beta) {
  return should_stop(candidate.parent_quality, candidate.child_qualities[0], candidate.child_qualities[1], beta);
}

FlatClustering flat_cluster(const PointSet& points, std::span<const std::size_t> members,
                            const FlatOptions& options) {
  if (members.empty()) throw Error("flat_cluster: no points");
  if (!(options.beta > 0.0)) throw Error("flat_cluster: beta must be positive");

  FlatClustering out;
  std::vector<IndexList> stack;
  stack.emplace_back(members.begin(), members.end());
  while (!stack.empty()) {
    IndexList cluster = std::move(stack.back());
    stack.pop_back();
    if (cluster.size() < std::max<std::size_t>(options.min_split_size, 2) || all_identical(points, cluster)) {
      out.clusters.push_back(std::move(cluster));
      continue;
    }
    auto split = binary_split(points, cluster, pddp_init(points, cluster, options.split), options.split);
    if (should_stop(split, options.beta)) {
      out.clusters.push_back(std::move(cluster));
      continue;
    }
    stack.push_back(std::move(split.children[1]));
    stack.push_back(std::move(split.children[0]));
  }

  std::vector<std::size_t> position(static_cast<std::size_t>(points.cols()), 0);
  for (std::size_t i = 0; i < members.size(); ++i) position[members[i]] = i;
  out.assignments.assign(members.size(), 0);
  for (std::size_t c = 0; c < out.clusters.size(); ++c) {
    for (const auto p : out.clusters[c]) out.assignments[position[p]] = c;
  }
  return out;
}

FlatClustering flat_cluster(const PointSet& points, const FlatOptions& options) {
  const auto all = iota_list(static_cast<std::size_t>(points.cols()));
  return flat_cluster(points, all, options);
}

}  // namespace hierindex
