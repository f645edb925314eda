#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace hierindex::testing {
namespace {

double subset_wcss(const PointSet& points, const std::vector<Eigen::Index>& idx) {
  if (idx.empty()) return 0.0;
  Vector mu = Vector::Zero(points.rows());
  for (const auto i : idx) mu += points.col(i);
  mu /= static_cast<double>(idx.size());
  double s = 0.0;
  for (const auto i : idx) s += (points.col(i) - mu).squaredNorm();
  return s;
}

}  // namespace

double best_two_partition_wcss(const PointSet& points) {
  const auto n = points.cols();
  if (n < 2 || n > 20) throw std::invalid_argument("best_two_partition_wcss: 2 <= n <= 20");
  double best = std::numeric_limits<double>::infinity();
  // Point n-1 always on side B; masks over the rest, excluding the empty A.
  for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
    std::vector<Eigen::Index> a, b;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i < n - 1 && (mask >> i) & 1u) {
        a.push_back(i);
      } else {
        b.push_back(i);
      }
    }
    best = std::min(best, subset_wcss(points, a) + subset_wcss(points, b));
  }
  return best;
}

double best_medoid_cost(const PointSet& points, std::size_t k) {
  const auto n = static_cast<std::size_t>(points.cols());
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> recurse = [&](std::size_t start) {
    if (chosen.size() == k) {
      double cost = 0.0;
      for (std::size_t o = 0; o < n; ++o) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto m : chosen) {
          d = std::min(d, (points.col(static_cast<Eigen::Index>(o)) - points.col(static_cast<Eigen::Index>(m))).norm());
        }
        cost += d;
      }
      best = std::min(best, cost);
      return;
    }
    for (std::size_t c = start; c < n; ++c) {
      chosen.push_back(c);
      recurse(c + 1);
      chosen.pop_back();
    }
  };
  recurse(0);
  return best;
}

namespace {

// Quad precision: the cofactor expansion loses roughly cond^2 relative
// accuracy, and the precision check feeds it ridge-regularized matrices with
// condition numbers near 1e8.
using Quad = __float128;

struct QuadMatrix {
  Eigen::Index n;
  std::vector<Quad> a;
  Quad& operator()(Eigen::Index r, Eigen::Index c) { return a[static_cast<std::size_t>(r * n + c)]; }
  Quad operator()(Eigen::Index r, Eigen::Index c) const { return a[static_cast<std::size_t>(r * n + c)]; }
};

QuadMatrix to_quad(const Eigen::MatrixXd& m) {
  QuadMatrix q{m.rows(), std::vector<Quad>(static_cast<std::size_t>(m.size()))};
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) q(r, c) = m(r, c);
  return q;
}

QuadMatrix minor_of(const QuadMatrix& m, Eigen::Index row, Eigen::Index col) {
  QuadMatrix out{m.n - 1, std::vector<Quad>(static_cast<std::size_t>((m.n - 1) * (m.n - 1)))};
  for (Eigen::Index i = 0, mi = 0; i < m.n; ++i) {
    if (i == row) continue;
    for (Eigen::Index j = 0, mj = 0; j < m.n; ++j) {
      if (j == col) continue;
      out(mi, mj++) = m(i, j);
    }
    ++mi;
  }
  return out;
}

Quad quad_determinant(const QuadMatrix& m) {
  if (m.n == 1) return m(0, 0);
  Quad det = 0;
  for (Eigen::Index c = 0; c < m.n; ++c) {
    const Quad sign = (c % 2 == 0) ? 1 : -1;
    det += sign * m(0, c) * quad_determinant(minor_of(m, 0, c));
  }
  return det;
}

}  // namespace

double cofactor_determinant(const Eigen::MatrixXd& m) { return static_cast<double>(quad_determinant(to_quad(m))); }

Eigen::MatrixXd adjugate_inverse(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  const QuadMatrix q = to_quad(m);
  if (n == 1) return Eigen::MatrixXd::Constant(1, 1, static_cast<double>(1 / q(0, 0)));
  const Quad det = quad_determinant(q);
  Eigen::MatrixXd inv(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const Quad sign = ((r + c) % 2 == 0) ? 1 : -1;
      // Adjugate is the transposed cofactor matrix.
      inv(c, r) = static_cast<double>(sign * quad_determinant(minor_of(q, r, c)) / det);
    }
  }
  return inv;
}

double permutation_agreement(const std::vector<std::size_t>& classes, const std::vector<std::size_t>& clusters) {
  const std::size_t nc = *std::max_element(classes.begin(), classes.end()) + 1;
  const std::size_t nk = *std::max_element(clusters.begin(), clusters.end()) + 1;
  std::vector<std::vector<std::size_t>> overlap(nc, std::vector<std::size_t>(nk, 0));
  for (std::size_t i = 0; i < classes.size(); ++i) ++overlap[classes[i]][clusters[i]];
  std::vector<char> used(nk, 0);
  std::size_t best = 0;
  std::function<void(std::size_t, std::size_t)> recurse = [&](std::size_t cls, std::size_t acc) {
    if (cls == nc) {
      best = std::max(best, acc);
      return;
    }
    recurse(cls + 1, acc);  // class left unmatched
    for (std::size_t k = 0; k < nk; ++k) {
      if (used[k]) continue;
      used[k] = 1;
      recurse(cls + 1, acc + overlap[cls][k]);
      used[k] = 0;
    }
  };
  recurse(0, 0);
  return static_cast<double>(best) / static_cast<double>(classes.size());
}

double pairwise_agreement(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t agree = 0, total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      agree += ((a[i] == a[j]) == (b[i] == b[j])) ? 1 : 0;
      ++total;
    }
  }
  return total ? static_cast<double>(agree) / static_cast<double>(total) : 1.0;
}

Eigen::MatrixXd naive_covariance(const PointSet& points) {
  const auto k = points.rows();
  const auto n = static_cast<double>(points.cols());
  Vector mu = Vector::Zero(k);
  for (Eigen::Index c = 0; c < points.cols(); ++c) mu += points.col(c);
  mu /= n;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      double s = 0.0;
      for (Eigen::Index c = 0; c < points.cols(); ++c) s += (points(i, c) - mu[i]) * (points(j, c) - mu[j]);
      cov(i, j) = s / n;
    }
  }
  return cov;
}

}  // namespace hierindex::testing
