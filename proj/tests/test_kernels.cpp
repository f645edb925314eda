#include <doctest.h>

#include <numeric>
#include <random>

#include "hierindex/kernels.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace hierindex;
namespace ks = hierindex::kernels::serial;
namespace kp = hierindex::kernels::parallel;

namespace {

kernels::SparseMatrix random_sparse(Eigen::Index rows, Eigen::Index cols, double density, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
      if (u(rng) < density) t.emplace_back(r, c, u(rng) * 5.0);
  kernels::SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

std::vector<std::size_t> all_members(std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), 0);
  return m;
}

}  // namespace

TEST_CASE("transpose_times: serial and parallel agree bitwise and match Eigen") {
  const auto m = random_sparse(300, 120, 0.05, 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(300, 7);
  const auto a = ks::transpose_times(m, x);
  const auto b = kp::transpose_times(m, x);
  CHECK(a == b);
  const Eigen::MatrixXd dense = Eigen::MatrixXd(m).transpose() * x;
  CHECK((a - dense).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("assign_nearest: serial and parallel agree and pick the true nearest") {
  const auto pts = testing::random_points(5, 400, 2);
  const auto centers = testing::random_points(5, 6, 3);
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < 400; i += 3) members.push_back(i);
  const auto a = ks::assign_nearest(pts, members, centers);
  const auto b = kp::assign_nearest(pts, members, centers);
  CHECK(a.labels == b.labels);
  CHECK(a.sq_distances == b.sq_distances);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    for (Eigen::Index c = 0; c < centers.cols(); ++c)
      CHECK(a.sq_distances[e] <= (pts.col(static_cast<Eigen::Index>(members[i])) - centers.col(c)).squaredNorm());
  }
}

TEST_CASE("assign_nearest breaks ties toward the lower center") {
  PointSet pts(1, 1);
  pts << 0.0;
  PointSet centers(1, 2);
  centers << -1.0, 1.0;
  const std::vector<std::size_t> members{0};
  CHECK(ks::assign_nearest(pts, members, centers).labels[0] == 0);
  CHECK(kp::assign_nearest(pts, members, centers).labels[0] == 0);
}

TEST_CASE("cosine_argmax: agreement, ties and zero vectors") {
  const auto q = testing::random_points(4, 200, 4);
  const auto r = testing::random_points(4, 50, 5);
  CHECK(ks::cosine_argmax(q, r) == kp::cosine_argmax(q, r));

  PointSet refs(2, 3);
  refs << 1, 2, 0,
          0, 0, 1;
  PointSet queries(2, 3);
  queries << 3, 0, 0,
             0, 0, 5;
  const std::vector<std::size_t> expected{0, 0, 2};
  CHECK(ks::cosine_argmax(queries, refs) == expected);
  CHECK(kp::cosine_argmax(queries, refs) == expected);
}

TEST_CASE("pairwise_distances: agreement and symmetry") {
  const auto pts = testing::random_points(3, 150, 6);
  const auto a = ks::pairwise_distances(pts);
  CHECK(a == kp::pairwise_distances(pts));
  CHECK(a == a.transpose());
  CHECK(a.diagonal().isZero());
  CHECK(a(3, 7) == doctest::Approx((pts.col(3) - pts.col(7)).norm()));
}

TEST_CASE("covariance: agreement and naive oracle") {
  const auto pts = testing::random_points(4, 300, 7);
  const auto members = all_members(300);
  const Vector mean = pts.rowwise().mean();
  const auto a = ks::covariance(pts, members, mean);
  CHECK(a == kp::covariance(pts, members, mean));
  CHECK((a - testing::naive_covariance(pts)).cwiseAbs().maxCoeff() < 1e-12);
}
