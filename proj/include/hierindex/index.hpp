#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hierindex/categorize.hpp"
#include "hierindex/corpus.hpp"
#include "hierindex/hierarchy.hpp"
#include "hierindex/lsi.hpp"

namespace hierindex {

inline constexpr const char* kIndexFormat = "hierindex/1";

struct BuildConfig {
  std::size_t topics = 20;
  TreeParams tree;
  SvdOptions svd;
  PreprocessConfig preprocess;
  /// L2-normalize semantic vectors (documents and queries) before clustering.
  bool normalize = false;
  std::size_t top_terms = 10;
};

/// Everything needed to browse the hierarchy and route new text into it.
struct HierIndex {
  BuildConfig config;
  Vocabulary vocabulary;
  Vector idf;
  LsiModel lsi;
  std::vector<std::string> doc_ids;
  std::vector<std::optional<std::string>> doc_labels;
  /// k x n clustering-space document vectors.
  PointSet doc_vectors;
  ClusterTree tree;
  std::vector<std::string> warnings;
};

/// Corpus -> tf-idf -> LSI -> cluster tree, with per-node top terms.
HierIndex build_index(const std::vector<RawDocument>& docs, const BuildConfig& config,
                      IngestReport* report = nullptr);

/// Projects text into the index's semantic space (fold-in plus the index's
/// normalization). `empty` is set when no known term carried weight.
Vector embed_text(const HierIndex& index, std::string_view text, bool* empty = nullptr);

/// Preprocess, weight with the stored idf, fold in, categorize. Text without
/// any known term lands on the root with a warning.
CategorizationResult categorize_text(const HierIndex& index, std::string_view text);

nlohmann::json to_json(const HierIndex& index);
HierIndex index_from_json(const nlohmann::json& doc);

/// Compact JSON; identical indexes serialize to identical bytes.
void save_index(const HierIndex& index, const std::filesystem::path& path);
HierIndex load_index(const std::filesystem::path& path);

}  // namespace hierindex
