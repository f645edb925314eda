#pragma once

#include <limits>
#include <span>

#include "hierindex/common.hpp"

namespace hierindex {

/// Quality of a cluster whose members all coincide.
inline constexpr double kPerfectQuality = std::numeric_limits<double>::infinity();

struct GaussianModel {
  Vector centroid;
  /// Population (1/n) covariance.
  Eigen::MatrixXd covariance;
  /// Inverse of covariance + ridge * I.
  Eigen::MatrixXd precision;
  double ridge = 0.0;
  std::size_t n = 0;

  Eigen::Index dim() const { return centroid.size(); }
};

/// Ridge candidates, as multiples of trace(covariance) / k.
inline constexpr double kRidgeLadder[] = {0.0, 1e-8, 1e-6, 1e-4, 1e-2};
inline constexpr double kMaxConditionNumber = 1e12;

/// Fits centroid and covariance over points[:, members] and picks the
/// smallest ridge from the ladder that leaves covariance + ridge * I with
/// condition number below 1e12. Throws Error on an empty member list.
GaussianModel fit_gaussian(const PointSet& points, std::span<const std::size_t> members);
/// All columns of `points`.
GaussianModel fit_gaussian(const PointSet& points);

/// Rebuilds the precision for a stored covariance and ridge.
GaussianModel restore_gaussian(Vector centroid, Eigen::MatrixXd covariance, double ridge, std::size_t n);

/// sqrt((x - mu)^T P (x - mu)) with the stored regularized precision P.
double mahalanobis(const GaussianModel& model, const Eigen::Ref<const Vector>& x);

/// 1 / mean Mahalanobis distance of the members; kPerfectQuality when that
/// mean is zero.
double cluster_quality(const GaussianModel& model, const PointSet& points,
                       std::span<const std::size_t> members);
double cluster_quality(const GaussianModel& model, const PointSet& points);

}  // namespace hierindex
