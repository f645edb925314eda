#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "hierindex/common.hpp"
#include "hierindex/stopwords.hpp"

namespace hierindex {

struct RawDocument {
  std::string id;
  std::string text;
  std::optional<std::string> label;
};

enum class CorpusLayout {
  /// One directory per class, one article per file; label = directory name.
  kNewsgroups,
  /// Every regular file under the root, unlabeled.
  kFlat,
};

struct LoadOptions {
  CorpusLayout layout = CorpusLayout::kNewsgroups;
  /// Drop a leading "Key: value" header block up to the first blank line.
  bool strip_headers = true;
};

/// Non-fatal ingest findings.
struct IngestReport {
  std::vector<std::string> warnings;
  std::vector<std::string> skipped_files;
  /// Ids of documents with no retained term (kept as zero columns).
  std::vector<std::string> empty_documents;
};

struct PreprocessConfig {
  std::size_t min_token_len = 2;
  std::size_t min_df = 2;
  double max_df_fraction = 0.5;
  StopwordSet stopwords = default_stopwords();
};

struct Vocabulary {
  std::vector<std::string> terms;
  std::vector<std::size_t> doc_freq;

  std::size_t size() const { return terms.size(); }
  /// Position of `term`, or nullopt when out of vocabulary.
  std::optional<std::size_t> find(std::string_view term) const;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

struct TfIdfMatrix {
  /// num_terms x num_docs.
  SparseMatrix weights;
  std::vector<std::string> column_ids;
  /// ln(N / df) per vocabulary term.
  Vector idf;

  std::size_t num_terms() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t num_docs() const { return static_cast<std::size_t>(weights.cols()); }
};

/// Reads a corpus directory in lexicographic path order. Throws Error when the
/// root cannot be listed; unreadable or binary files are skipped and recorded.
std::vector<RawDocument> load_corpus(const std::filesystem::path& root, const LoadOptions& options,
                                     IngestReport* report = nullptr);

/// Removes a leading mail/news header block. Text without one is returned as is.
std::string strip_header_block(std::string_view text);

/// Lowercase, split on non-letters, drop short tokens and stopwords, stem.
std::vector<std::string> preprocess(std::string_view text, const PreprocessConfig& config);

struct CorpusMatrix {
  Vocabulary vocabulary;
  TfIdfMatrix matrix;
};

/// Raw-count tf times ln(N/df) idf, after df pruning. Throws Error when fewer
/// than two documents are given or every document is empty.
CorpusMatrix build_matrix(const std::vector<RawDocument>& docs, const PreprocessConfig& config,
                          IngestReport* report = nullptr);

/// Sparse tf-idf weights of an arbitrary text over a fixed vocabulary;
/// unknown terms are dropped.
Eigen::SparseVector<double> term_weights(std::string_view text, const Vocabulary& vocabulary,
                                         const Vector& idf, const PreprocessConfig& config);

}  // namespace hierindex
