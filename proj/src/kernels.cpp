#include "hierindex/kernels.hpp"

#include <cmath>
#include <limits>

namespace hierindex::kernels {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row j of m^T x, accumulated in stored-entry order.
inline void transpose_times_row(const SparseMatrix& m, const RowMajor& xr, Eigen::Index j,
                                RowMajor& out) {
  auto row = out.row(j);
  for (SparseMatrix::InnerIterator it(m, j); it; ++it) row.noalias() += it.value() * xr.row(it.row());
}

inline void nearest_one(const PointSet& points, std::size_t point, const PointSet& centers,
                        std::size_t& label, double& sq_distance) {
  label = 0;
  sq_distance = std::numeric_limits<double>::infinity();
  const auto x = points.col(static_cast<Eigen::Index>(point));
  for (Eigen::Index c = 0; c < centers.cols(); ++c) {
    const double d = (x - centers.col(c)).squaredNorm();
    if (d < sq_distance) {
      sq_distance = d;
      label = static_cast<std::size_t>(c);
    }
  }
}

inline std::size_t cosine_one(const PointSet& queries, Eigen::Index q, const PointSet& refs,
                              const Vector& ref_norms) {
  const auto x = queries.col(q);
  const double qn = x.norm();
  std::size_t best = 0;
  double best_sim = -std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < refs.cols(); ++r) {
    const double denom = qn * ref_norms[r];
    const double sim = denom > 0.0 ? x.dot(refs.col(r)) / denom : 0.0;
    if (sim > best_sim) {
      best_sim = sim;
      best = static_cast<std::size_t>(r);
    }
  }
  return best;
}

inline void distances_row(const PointSet& points, Eigen::Index i, Eigen::MatrixXd& out) {
  for (Eigen::Index j = i + 1; j < points.cols(); ++j) {
    const double d = (points.col(i) - points.col(j)).norm();
    out(i, j) = d;
    out(j, i) = d;
  }
}

inline void covariance_row(const PointSet& points, std::span<const std::size_t> members,
                           const Vector& mean, Eigen::Index i, Eigen::MatrixXd& out) {
  const auto k = points.rows();
  const double inv_n = 1.0 / static_cast<double>(members.size());
  for (Eigen::Index j = i; j < k; ++j) {
    double acc = 0.0;
    for (const auto p : members) {
      const auto x = points.col(static_cast<Eigen::Index>(p));
      acc += (x[i] - mean[i]) * (x[j] - mean[j]);
    }
    out(i, j) = acc * inv_n;
    out(j, i) = out(i, j);
  }
}

void check_rows(const SparseMatrix& m, const Eigen::MatrixXd& x) {
  if (m.rows() != x.rows()) throw Error("transpose_times: dimension mismatch");
}

}  // namespace

namespace serial {

Eigen::MatrixXd transpose_times(const SparseMatrix& m, const Eigen::MatrixXd& x) {
  check_rows(m, x);
  const RowMajor xr = x;
  RowMajor out = RowMajor::Zero(m.cols(), x.cols());
  for (Eigen::Index j = 0; j < m.outerSize(); ++j) transpose_times_row(m, xr, j, out);
  return out;
}

Assignment assign_nearest(const PointSet& points, std::span<const std::size_t> members,
                          const PointSet& centers) {
  Assignment a{std::vector<std::size_t>(members.size()), Vector(static_cast<Eigen::Index>(members.size()))};
  for (std::size_t i = 0; i < members.size(); ++i) {
    nearest_one(points, members[i], centers, a.labels[i], a.sq_distances[static_cast<Eigen::Index>(i)]);
  }
  return a;
}

std::vector<std::size_t> cosine_argmax(const PointSet& queries, const PointSet& references) {
  const Vector norms = references.colwise().norm().transpose();
  std::vector<std::size_t> out(static_cast<std::size_t>(queries.cols()));
  for (Eigen::Index q = 0; q < queries.cols(); ++q) {
    out[static_cast<std::size_t>(q)] = cosine_one(queries, q, references, norms);
  }
  return out;
}

Eigen::MatrixXd pairwise_distances(const PointSet& points) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(points.cols(), points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) distances_row(points, i, out);
  return out;
}

Eigen::MatrixXd covariance(const PointSet& points, std::span<const std::size_t> members,
                           const Vector& mean) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(points.rows(), points.rows());
  if (members.empty()) return out;
  for (Eigen::Index i = 0; i < points.rows(); ++i) covariance_row(points, members, mean, i, out);
  return out;
}

}  // namespace serial

namespace parallel {

Eigen::MatrixXd transpose_times(const SparseMatrix& m, const Eigen::MatrixXd& x) {
  check_rows(m, x);
  const RowMajor xr = x;
  RowMajor out = RowMajor::Zero(m.cols(), x.cols());
#pragma omp parallel for schedule(dynamic, 64)
  for (Eigen::Index j = 0; j < m.outerSize(); ++j) transpose_times_row(m, xr, j, out);
  return out;
}

Assignment assign_nearest(const PointSet& points, std::span<const std::size_t> members,
                          const PointSet& centers) {
  Assignment a{std::vector<std::size_t>(members.size()), Vector(static_cast<Eigen::Index>(members.size()))};
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(members.size()); ++i) {
    const auto u = static_cast<std::size_t>(i);
    nearest_one(points, members[u], centers, a.labels[u], a.sq_distances[i]);
  }
  return a;
}

std::vector<std::size_t> cosine_argmax(const PointSet& queries, const PointSet& references) {
  const Vector norms = references.colwise().norm().transpose();
  std::vector<std::size_t> out(static_cast<std::size_t>(queries.cols()));
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index q = 0; q < queries.cols(); ++q) {
    out[static_cast<std::size_t>(q)] = cosine_one(queries, q, references, norms);
  }
  return out;
}

Eigen::MatrixXd pairwise_distances(const PointSet& points) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(points.cols(), points.cols());
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < points.cols(); ++i) distances_row(points, i, out);
  return out;
}

Eigen::MatrixXd covariance(const PointSet& points, std::span<const std::size_t> members,
                           const Vector& mean) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(points.rows(), points.rows());
  if (members.empty()) return out;
#pragma omp parallel for schedule(dynamic, 1)
  for (Eigen::Index i = 0; i < points.rows(); ++i) covariance_row(points, members, mean, i, out);
  return out;
}

}  // namespace parallel
}  // namespace hierindex::kernels
