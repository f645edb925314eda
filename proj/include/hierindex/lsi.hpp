#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "hierindex/common.hpp"
#include "hierindex/corpus.hpp"

namespace hierindex {

/// Tag stored with every model: document and query coordinates are U_k^T x.
inline constexpr const char* kProjectionConvention = "Uk^T*x";

struct LsiModel {
  std::size_t k = 0;
  /// num_terms x k, orthonormal columns.
  Eigen::MatrixXd term_factors;
  /// Strictly positive, nonincreasing.
  Vector singular_values;
  std::uint64_t vocabulary_fingerprint = 0;
  std::uint64_t seed = 0;
};

struct SemanticVector {
  Vector coords;
  std::optional<std::string> doc_id;
};

struct SvdOptions {
  std::uint64_t seed = 42;
  std::size_t oversampling = 8;
  double tolerance = 1e-6;
  std::size_t max_iterations = 100;
};

struct LsiFit {
  LsiModel model;
  /// k x num_docs; column d is U_k^T times document d's tf-idf column.
  PointSet doc_vectors;
  std::vector<std::string> warnings;
  std::size_t iterations = 0;
};

/// FNV-1a over the newline-joined term list.
std::uint64_t vocabulary_fingerprint(const Vocabulary& vocabulary);

/// Rank-k truncated SVD by randomized subspace iteration. When the matrix has
/// numerical rank r < k the model is built with k = r and a warning.
/// Throws Error when k == 0 or the matrix is zero.
LsiFit fit_lsi(const TfIdfMatrix& matrix, std::size_t k, const SvdOptions& options = {});

struct ProjectedQuery {
  SemanticVector vector;
  /// True when the query carried no in-vocabulary weight.
  bool empty_query = false;
};

/// U_k^T q for a sparse term-weight vector over the model's vocabulary.
ProjectedQuery project_query(const LsiModel& model, const Eigen::SparseVector<double>& query_weights);

/// Dense overload, used by tests and batch fold-in.
Vector project_dense(const LsiModel& model, const Vector& query_weights);

}  // namespace hierindex
