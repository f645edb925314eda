#include "hierindex/lsi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "hierindex/kernels.hpp"

namespace hierindex {
namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

// Largest-magnitude entry of every column made positive.
void fix_signs(Eigen::MatrixXd& u) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index arg = 0;
    u.col(c).cwiseAbs().maxCoeff(&arg);
    if (u(arg, c) < 0.0) u.col(c) = -u.col(c);
  }
}

}  // namespace

std::uint64_t vocabulary_fingerprint(const Vocabulary& vocabulary) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (const auto& term : vocabulary.terms) {
    for (const char c : term) mix(static_cast<unsigned char>(c));
    mix('\n');
  }
  return h;
}

LsiFit fit_lsi(const TfIdfMatrix& matrix, std::size_t k, const SvdOptions& options) {
  if (k == 0) throw Error("fit_lsi: number of topics must be positive");
  const SparseMatrix& a = matrix.weights;
  const auto m = a.rows();
  const auto n = a.cols();
  if (m == 0 || n == 0) throw Error("fit_lsi: empty matrix");
  const SparseMatrix at = a.transpose();

  LsiFit fit;
  const auto full = std::min(m, n);
  const auto width = std::min<Eigen::Index>(static_cast<Eigen::Index>(k + options.oversampling), full);

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd omega(n, width);
  for (Eigen::Index j = 0; j < width; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) omega(i, j) = gauss(rng);
  }

  // Q spans an approximation of range(A); each pass refines it by one
  // application of A A^T, re-orthonormalizing on both sides.
  Eigen::MatrixXd q = orthonormal_basis(kernels::transpose_times(at, omega));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
  Vector previous;
  const auto tracked = std::min<Eigen::Index>(static_cast<Eigen::Index>(k), width);
  for (std::size_t it = 1;; ++it) {
    const Eigen::MatrixXd bt = kernels::transpose_times(a, q);  // (Q^T A)^T, n x width
    svd.compute(bt, Eigen::ComputeThinV);
    const Vector current = svd.singularValues().head(tracked);
    fit.iterations = it;
    bool converged = previous.size() == current.size();
    for (Eigen::Index i = 0; converged && i < current.size(); ++i) {
      const double scale = std::max(current[i], std::numeric_limits<double>::min());
      converged = std::abs(current[i] - previous[i]) <= options.tolerance * scale;
    }
    if (width == full || converged || it >= options.max_iterations) break;
    previous = current;
    q = orthonormal_basis(kernels::transpose_times(at, orthonormal_basis(bt)));
  }

  const Vector sigma = svd.singularValues();
  if (sigma.size() == 0 || !(sigma[0] > 0.0)) throw Error("fit_lsi: matrix has no nonzero singular value");
  const double cutoff = static_cast<double>(std::max(m, n)) * std::numeric_limits<double>::epsilon() * sigma[0];
  std::size_t rank = 0;
  while (rank < static_cast<std::size_t>(sigma.size()) && sigma[static_cast<Eigen::Index>(rank)] > cutoff) ++rank;
  std::size_t kept = k;
  if (rank < k) {
    kept = rank;
    fit.warnings.push_back("effective rank " + std::to_string(rank) + " < requested topics " +
                           std::to_string(k) + "; using " + std::to_string(rank));
  }
  const auto kk = static_cast<Eigen::Index>(kept);

  LsiModel& model = fit.model;
  model.k = kept;
  model.seed = options.seed;
  model.singular_values = sigma.head(kk);
  model.term_factors = q * svd.matrixV().leftCols(kk);
  fix_signs(model.term_factors);
  fit.doc_vectors = kernels::transpose_times(a, model.term_factors).transpose();
  return fit;
}

ProjectedQuery project_query(const LsiModel& model, const Eigen::SparseVector<double>& query_weights) {
  if (query_weights.size() != model.term_factors.rows()) {
    throw Error("project_query: query has " + std::to_string(query_weights.size()) +
                " terms, model vocabulary has " + std::to_string(model.term_factors.rows()));
  }
  ProjectedQuery out;
  out.vector.coords = Vector::Zero(static_cast<Eigen::Index>(model.k));
  for (Eigen::SparseVector<double>::InnerIterator it(query_weights); it; ++it) {
    out.vector.coords.noalias() += it.value() * model.term_factors.row(it.index()).transpose();
  }
  out.empty_query = query_weights.nonZeros() == 0;
  return out;
}

Vector project_dense(const LsiModel& model, const Vector& query_weights) {
  if (query_weights.size() != model.term_factors.rows()) throw Error("project_dense: dimension mismatch");
  return model.term_factors.transpose() * query_weights;
}

}  // namespace hierindex
