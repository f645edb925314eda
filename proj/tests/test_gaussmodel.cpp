#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "hierindex/gaussmodel.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace hierindex;

namespace {

PointSet square() {
  PointSet p(2, 4);
  p << 0, 2, 0, 2,
       0, 0, 2, 2;
  return p;
}

Eigen::MatrixXd random_invertible(Eigen::Index k, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(k, k);
  for (;;) {
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
    if (std::abs(a.determinant()) > 0.2) return a;
  }
}

Eigen::Matrix2d rotation(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace

TEST_CASE("single point: zero covariance, ridge-only precision") {
  PointSet p(3, 1);
  p << 1, -2, 5;
  const auto g = fit_gaussian(p);
  CHECK(g.centroid == Vector(p.col(0)));
  CHECK(g.covariance.isZero());
  CHECK(g.n == 1);
  REQUIRE(g.ridge > 0.0);
  CHECK((g.precision - Eigen::MatrixXd::Identity(3, 3) / g.ridge).cwiseAbs().maxCoeff() <= 1e-6 / g.ridge);
  CHECK(cluster_quality(g, p) == kPerfectQuality);
}

TEST_CASE("square of four points") {
  const auto g = fit_gaussian(square());
  CHECK(g.centroid.isApprox(Eigen::Vector2d(1, 1)));
  CHECK((g.covariance - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(g.ridge == 0.0);
  CHECK(g.n == 4);
}

TEST_CASE("covariance rotates with the data") {
  const auto blob = testing::gaussian_blobs(PointSet::Zero(2, 1), 200, 1.0, 4).points;
  const auto base = fit_gaussian(blob);
  const Eigen::Matrix2d r = rotation(0.7);
  const auto rotated = fit_gaussian(PointSet(r * blob));
  CHECK((rotated.covariance - r * base.covariance * r.transpose()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fit invariants: symmetry, precision inverse, members subset") {
  const auto pts = testing::random_points(4, 50, 3);
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < 50; i += 2) members.push_back(i);
  const auto g = fit_gaussian(pts, members);
  CHECK((g.covariance - g.covariance.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  const Eigen::MatrixXd reg = g.covariance + g.ridge * Eigen::MatrixXd::Identity(4, 4);
  CHECK((g.precision * reg - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-6);
  PointSet sub(4, static_cast<Eigen::Index>(members.size()));
  for (std::size_t i = 0; i < members.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = pts.col(static_cast<Eigen::Index>(members[i]));
  CHECK((g.covariance - testing::naive_covariance(sub)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(fit_gaussian(pts, std::vector<std::size_t>{}), Error);
}

TEST_CASE("ridge ladder climbs for degenerate clusters") {
  // Two points in 3-D: rank-1 covariance.
  PointSet p(3, 2);
  p << 0, 1,
       0, 1,
       0, 0;
  const auto g = fit_gaussian(p);
  const double unit = g.covariance.trace() / 3.0;
  bool on_ladder = false;
  for (double step : kRidgeLadder) on_ladder = on_ladder || g.ridge == step * unit;
  CHECK(on_ladder);
  CHECK(g.ridge > 0.0);
  const Eigen::MatrixXd reg = g.covariance + g.ridge * Eigen::MatrixXd::Identity(3, 3);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(reg);
  const auto s = svd.singularValues();
  CHECK(s[0] / s[2] < kMaxConditionNumber);
}

TEST_CASE("mahalanobis examples") {
  const auto g = fit_gaussian(square());
  CHECK(mahalanobis(g, g.centroid) == 0.0);
  const Vector x = Eigen::Vector2d(4, -3);
  CHECK(mahalanobis(g, x) == doctest::Approx((x - g.centroid).norm()).epsilon(1e-12));
  Eigen::Matrix2d cov;
  cov << 4, 0, 0, 1;
  const auto d = restore_gaussian(Vector::Zero(2), cov, 0.0, 10);
  CHECK(mahalanobis(d, Eigen::Vector2d(2, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(mahalanobis(d, Eigen::Vector3d(1, 1, 1)), Error);
}

TEST_CASE("sigma^2 I covariance divides Euclidean distance by sigma") {
  for (double sigma : {0.5, 1.0, 2.0}) {
    const auto g = restore_gaussian(Eigen::Vector3d(1, 2, 3), sigma * sigma * Eigen::Matrix3d::Identity(), 0.0, 5);
    const Eigen::Vector3d x(-1, 0.5, 7);
    CHECK(mahalanobis(g, x) == doctest::Approx((x - g.centroid).norm() / sigma).epsilon(1e-12));
  }
}

TEST_CASE("affine equivariance") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto pts = testing::random_points(3, 30, seed);
    const Eigen::MatrixXd a = random_invertible(3, seed + 100);
    const auto g = fit_gaussian(pts);
    const auto ga = fit_gaussian(PointSet(a * pts));
    REQUIRE(g.ridge == 0.0);
    REQUIRE(ga.ridge == 0.0);
    const Eigen::Vector3d y(0.3, -0.8, 1.4);
    CHECK(std::abs(mahalanobis(ga, a * y) - mahalanobis(g, y)) <= 1e-6);
  }
}

TEST_CASE("fit is permutation invariant") {
  const auto pts = testing::random_points(3, 40, 8);
  std::vector<std::size_t> order(40);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(1));
  const auto a = fit_gaussian(pts);
  const auto b = fit_gaussian(pts, order);
  CHECK((a.centroid - b.centroid).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((a.covariance - b.covariance).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((a.precision - b.precision).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("precision matches an adjugate inverse") {
  for (Eigen::Index k = 1; k <= 4; ++k) {
    for (std::size_t n : {1u, 3u, 8u, 20u}) {
      const auto pts = testing::random_points(static_cast<std::size_t>(k), n, static_cast<unsigned>(k * 31 + n));
      const auto g = fit_gaussian(pts);
      const Eigen::MatrixXd reg = g.covariance + g.ridge * Eigen::MatrixXd::Identity(k, k);
      const Eigen::MatrixXd oracle = testing::adjugate_inverse(reg);
      const double scale = std::max(1.0, oracle.cwiseAbs().maxCoeff());
      CAPTURE(k);
      CAPTURE(n);
      CHECK((g.precision - oracle).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    }
  }
}

TEST_CASE("cluster quality examples") {
  PointSet same(2, 3);
  same << 1, 1, 1,
          4, 4, 4;
  CHECK(cluster_quality(fit_gaussian(same), same) == kPerfectQuality);

  const auto unit = restore_gaussian(Vector::Zero(2), Eigen::Matrix2d::Identity(), 0.0, 4);
  PointSet ring(2, 4);
  ring << 2, -2, 0, 0,
          0, 0, 2, -2;
  CHECK(cluster_quality(unit, ring) == doctest::Approx(0.5).epsilon(1e-12));

  const auto pts = testing::random_points(2, 25, 12);
  const auto g = fit_gaussian(pts);
  const PointSet halved = (pts.colwise() - g.centroid) * 0.5 + g.centroid.replicate(1, 25);
  CHECK(cluster_quality(g, halved) == doctest::Approx(2.0 * cluster_quality(g, pts)).epsilon(1e-12));

  std::vector<std::size_t> members{0, 1, 2};
  PointSet sub(2, 3);
  for (int i = 0; i < 3; ++i) sub.col(i) = pts.col(i);
  CHECK(cluster_quality(g, pts, members) == doctest::Approx(cluster_quality(g, sub)).epsilon(1e-15));
}
