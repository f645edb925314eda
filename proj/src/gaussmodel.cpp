#include "hierindex/gaussmodel.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "hierindex/kernels.hpp"

namespace hierindex {
namespace {

IndexList all_columns(const PointSet& points) {
  IndexList idx(static_cast<std::size_t>(points.cols()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

using WideMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using WideVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Extended precision: with a ridge near the bottom of the ladder the
// regularized covariance has condition number up to 1e12, which would eat
// most of a double's mantissa.
Eigen::MatrixXd regularized_inverse(const Eigen::MatrixXd& covariance, double ridge) {
  WideMatrix reg = covariance.cast<long double>();
  reg.diagonal().array() += static_cast<long double>(ridge);
  const Eigen::SelfAdjointEigenSolver<WideMatrix> eig(reg);
  const WideVector inv = eig.eigenvalues().cwiseInverse();
  const WideMatrix p = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  return ((p + p.transpose()) * 0.5L).cast<double>();
}

}  // namespace

GaussianModel fit_gaussian(const PointSet& points, std::span<const std::size_t> members) {
  if (members.empty()) throw Error("fit_gaussian: empty point set");
  const auto k = points.rows();
  GaussianModel g;
  g.n = members.size();

  const auto first = points.col(static_cast<Eigen::Index>(members.front()));
  bool identical = true;
  g.centroid = Vector::Zero(k);
  for (const auto p : members) {
    const auto x = points.col(static_cast<Eigen::Index>(p));
    g.centroid += x;
    identical = identical && x == first;
  }
  // Exact centroid for coincident points so their distances are exactly zero.
  if (identical) {
    g.centroid = first;
  } else {
    g.centroid /= static_cast<double>(g.n);
  }
  g.covariance = kernels::covariance(points, members, g.centroid);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.covariance);
  const double trace = g.covariance.trace();
  const double scale = trace > 0.0 ? trace / static_cast<double>(k) : 1.0;
  const double top = eig.eigenvalues().size() ? eig.eigenvalues().maxCoeff() : 0.0;
  const double bottom = eig.eigenvalues().size() ? eig.eigenvalues().minCoeff() : 0.0;
  for (const double step : kRidgeLadder) {
    const double ridge = step * scale;
    const double lo = bottom + ridge;
    if (lo > 0.0 && (top + ridge) / lo < kMaxConditionNumber) {
      g.ridge = ridge;
      break;
    }
    g.ridge = ridge;
  }
  g.precision = regularized_inverse(g.covariance, g.ridge);
  return g;
}

GaussianModel fit_gaussian(const PointSet& points) { return fit_gaussian(points, all_columns(points)); }

GaussianModel restore_gaussian(Vector centroid, Eigen::MatrixXd covariance, double ridge, std::size_t n) {
  GaussianModel g;
  g.centroid = std::move(centroid);
  g.covariance = std::move(covariance);
  g.ridge = ridge;
  g.n = n;
  g.precision = regularized_inverse(g.covariance, ridge);
  return g;
}

double mahalanobis(const GaussianModel& model, const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.dim()) {
    throw Error("mahalanobis: point has dimension " + std::to_string(x.size()) + ", model has " +
                std::to_string(model.dim()));
  }
  const Vector diff = x - model.centroid;
  const double q = diff.dot(model.precision * diff);
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

double cluster_quality(const GaussianModel& model, const PointSet& points,
                       std::span<const std::size_t> members) {
  if (members.empty()) throw Error("cluster_quality: empty point set");
  double total = 0.0;
  for (const auto p : members) total += mahalanobis(model, points.col(static_cast<Eigen::Index>(p)));
  const double mean = total / static_cast<double>(members.size());
  return mean > 0.0 ? 1.0 / mean : kPerfectQuality;
}

double cluster_quality(const GaussianModel& model, const PointSet& points) {
  return cluster_quality(model, points, all_columns(points));
}

}  // namespace hierindex
