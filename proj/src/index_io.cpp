#include "hierindex/index.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hierindex {
using nlohmann::json;

namespace {

void normalize_columns(PointSet& points) {
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    const double norm = points.col(c).norm();
    if (norm > 0.0) points.col(c) /= norm;
  }
}

json vector_json(const Vector& v) { return json(std::vector<double>(v.begin(), v.end())); }

Vector vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// Row-major nested arrays.
json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_json(m.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error("index file: ragged matrix row");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

HierIndex build_index(const std::vector<RawDocument>& docs, const BuildConfig& config, IngestReport* report) {
  if (config.topics == 0) throw Error("topics must be positive");
  if (!(config.tree.beta > 0.0)) throw Error("beta must be positive");

  HierIndex index;
  index.config = config;
  auto corpus = build_matrix(docs, config.preprocess, report);

  auto fit = fit_lsi(corpus.matrix, config.topics, config.svd);
  fit.model.vocabulary_fingerprint = vocabulary_fingerprint(corpus.vocabulary);
  index.warnings = fit.warnings;
  if (config.normalize) normalize_columns(fit.doc_vectors);

  index.tree = build_tree(fit.doc_vectors, config.tree);
  for (auto& node : index.tree.nodes) {
    node.top_terms = node_top_terms(index.tree, node.id, config.top_terms, corpus.matrix, corpus.vocabulary);
  }

  index.vocabulary = std::move(corpus.vocabulary);
  index.idf = std::move(corpus.matrix.idf);
  index.lsi = std::move(fit.model);
  index.doc_vectors = std::move(fit.doc_vectors);
  index.doc_ids.reserve(docs.size());
  for (const auto& d : docs) {
    index.doc_ids.push_back(d.id);
    index.doc_labels.push_back(d.label);
  }
  return index;
}

Vector embed_text(const HierIndex& index, std::string_view text, bool* empty) {
  const auto weights = term_weights(text, index.vocabulary, index.idf, index.config.preprocess);
  auto projected = project_query(index.lsi, weights);
  if (empty) *empty = projected.empty_query;
  Vector v = std::move(projected.vector.coords);
  if (index.config.normalize && v.norm() > 0.0) v.normalize();
  return v;
}

CategorizationResult categorize_text(const HierIndex& index, std::string_view text) {
  bool empty = false;
  const Vector v = embed_text(index, text, &empty);
  if (empty) {
    CategorizationResult result;
    const auto& root = index.tree.node(index.tree.root);
    result.node = root.id;
    result.path.push_back({root.id, mahalanobis(root.gaussian, v), std::nullopt, 0.0});
    result.warnings.push_back("query has no known terms; returning the root");
    return result;
  }
  return categorize(index.tree, v);
}

json to_json(const HierIndex& index) {
  const auto& cfg = index.config;
  json params = {
      {"topics", cfg.topics},
      {"beta", cfg.tree.beta},
      {"seed", cfg.svd.seed},
      {"split_seed", cfg.tree.split.seed},
      {"min_split_size", cfg.tree.min_split_size},
      {"max_levels", cfg.tree.max_levels},
      {"pddp_offset", cfg.tree.split.literal_offset ? "literal_raw_projection" : "mean_abs_centered_projection"},
      {"power_tolerance", cfg.tree.split.power_tolerance},
      {"power_max_iterations", cfg.tree.split.power_max_iterations},
      {"lloyd_max_iterations", cfg.tree.split.lloyd_max_iterations},
      {"lloyd_metric", "euclidean"},
      {"stop_rule", "Q_parent <= beta * mean(Q_children)"},
      {"covariance", "population"},
      {"ridge_ladder", std::vector<double>(std::begin(kRidgeLadder), std::end(kRidgeLadder))},
      {"normalize", cfg.normalize},
      {"top_terms", cfg.top_terms},
      {"svd",
       {{"method", "randomized_subspace_iteration"},
        {"oversampling", cfg.svd.oversampling},
        {"tolerance", cfg.svd.tolerance},
        {"max_iterations", cfg.svd.max_iterations}}},
      {"weighting", {{"tf", "raw_count"}, {"idf", "ln(N/df)"}}},
      {"preprocess",
       {{"min_token_len", cfg.preprocess.min_token_len},
        {"min_df", cfg.preprocess.min_df},
        {"max_df_fraction", cfg.preprocess.max_df_fraction},
        {"stemmer", "porter"},
        {"stopwords", std::vector<std::string>(cfg.preprocess.stopwords.begin(), cfg.preprocess.stopwords.end())}}},
  };

  json labels = json::array();
  for (const auto& l : index.doc_labels) labels.push_back(l ? json(*l) : json(nullptr));

  json nodes = json::array();
  for (const auto& node : index.tree.nodes) {
    json terms = json::array();
    for (const auto& tw : node.top_terms) terms.push_back({tw.term, tw.weight});
    json j = {
        {"id", node.id},
        {"level", node.level},
        {"children", node.children},
        {"n", node.gaussian.n},
        {"centroid", vector_json(node.gaussian.centroid)},
        {"covariance", matrix_json(node.gaussian.covariance)},
        {"ridge", node.gaussian.ridge},
        {"top_terms", terms},
    };
    if (node.is_leaf()) j["documents"] = node.direct_documents;
    nodes.push_back(std::move(j));
  }

  return {
      {"format", kIndexFormat},
      {"build_params", params},
      {"vocabulary", {{"terms", index.vocabulary.terms}, {"doc_freq", index.vocabulary.doc_freq}, {"idf", vector_json(index.idf)}}},
      {"lsi",
       {{"k", index.lsi.k},
        {"convention", kProjectionConvention},
        {"seed", index.lsi.seed},
        {"vocabulary_fingerprint", hex64(index.lsi.vocabulary_fingerprint)},
        {"singular_values", vector_json(index.lsi.singular_values)},
        {"term_factors", matrix_json(index.lsi.term_factors)}}},
      {"documents", {{"ids", index.doc_ids}, {"labels", labels}, {"vectors", matrix_json(index.doc_vectors.transpose())}}},
      {"tree",
       {{"root", index.tree.root},
        {"num_documents", index.tree.num_documents},
        {"level_counts", index.tree.level_counts()},
        {"notes", index.tree.notes},
        {"nodes", nodes}}},
      {"warnings", index.warnings},
  };
}

namespace {

HierIndex parse_index(const json& doc) {
  if (doc.value("format", "") != kIndexFormat) {
    throw Error("not a " + std::string(kIndexFormat) + " index (format tag: " + doc.value("format", "<none>") + ")");
  }
  HierIndex index;
  const auto& p = doc.at("build_params");
  auto& cfg = index.config;
  cfg.topics = p.at("topics").get<std::size_t>();
  cfg.tree.beta = p.at("beta").get<double>();
  cfg.svd.seed = p.at("seed").get<std::uint64_t>();
  cfg.tree.split.seed = p.at("split_seed").get<std::uint64_t>();
  cfg.tree.min_split_size = p.at("min_split_size").get<std::size_t>();
  cfg.tree.max_levels = p.at("max_levels").get<std::size_t>();
  cfg.tree.split.literal_offset = p.at("pddp_offset").get<std::string>() == "literal_raw_projection";
  cfg.tree.split.power_tolerance = p.at("power_tolerance").get<double>();
  cfg.tree.split.power_max_iterations = p.at("power_max_iterations").get<std::size_t>();
  cfg.tree.split.lloyd_max_iterations = p.at("lloyd_max_iterations").get<std::size_t>();
  cfg.normalize = p.at("normalize").get<bool>();
  cfg.top_terms = p.at("top_terms").get<std::size_t>();
  cfg.svd.oversampling = p.at("svd").at("oversampling").get<std::size_t>();
  cfg.svd.tolerance = p.at("svd").at("tolerance").get<double>();
  cfg.svd.max_iterations = p.at("svd").at("max_iterations").get<std::size_t>();
  const auto& pp = p.at("preprocess");
  cfg.preprocess.min_token_len = pp.at("min_token_len").get<std::size_t>();
  cfg.preprocess.min_df = pp.at("min_df").get<std::size_t>();
  cfg.preprocess.max_df_fraction = pp.at("max_df_fraction").get<double>();
  cfg.preprocess.stopwords.clear();
  for (const auto& w : pp.at("stopwords")) cfg.preprocess.stopwords.insert(w.get<std::string>());

  const auto& v = doc.at("vocabulary");
  index.vocabulary.terms = v.at("terms").get<std::vector<std::string>>();
  index.vocabulary.doc_freq = v.at("doc_freq").get<std::vector<std::size_t>>();
  index.idf = vector_from(v.at("idf"));

  const auto& l = doc.at("lsi");
  if (l.at("convention").get<std::string>() != kProjectionConvention) throw Error("index file: unsupported projection convention");
  index.lsi.k = l.at("k").get<std::size_t>();
  index.lsi.seed = l.at("seed").get<std::uint64_t>();
  index.lsi.vocabulary_fingerprint = std::stoull(l.at("vocabulary_fingerprint").get<std::string>(), nullptr, 16);
  index.lsi.singular_values = vector_from(l.at("singular_values"));
  const auto k = static_cast<Eigen::Index>(index.lsi.k);
  index.lsi.term_factors = matrix_from(l.at("term_factors"), k);
  if (index.lsi.vocabulary_fingerprint != vocabulary_fingerprint(index.vocabulary) ||
      index.lsi.term_factors.rows() != static_cast<Eigen::Index>(index.vocabulary.size())) {
    throw Error("index file: LSI model does not match its vocabulary");
  }

  const auto& d = doc.at("documents");
  index.doc_ids = d.at("ids").get<std::vector<std::string>>();
  for (const auto& label : d.at("labels")) {
    index.doc_labels.push_back(label.is_null() ? std::nullopt : std::optional<std::string>(label.get<std::string>()));
  }
  index.doc_vectors = matrix_from(d.at("vectors"), k).transpose();

  const auto& t = doc.at("tree");
  auto& tree = index.tree;
  tree.root = t.at("root").get<NodeId>();
  tree.num_documents = t.at("num_documents").get<std::size_t>();
  tree.notes = t.at("notes").get<std::vector<std::string>>();
  for (const auto& jn : t.at("nodes")) {
    ClusterNode node;
    node.id = jn.at("id").get<NodeId>();
    if (node.id != tree.nodes.size()) throw Error("index file: node ids must be dense and ordered");
    node.level = jn.at("level").get<std::size_t>();
    node.children = jn.at("children").get<std::vector<NodeId>>();
    if (jn.contains("documents")) node.direct_documents = jn.at("documents").get<IndexList>();
    node.gaussian = restore_gaussian(vector_from(jn.at("centroid")), matrix_from(jn.at("covariance"), k),
                                     jn.at("ridge").get<double>(), jn.at("n").get<std::size_t>());
    for (const auto& tw : jn.at("top_terms")) node.top_terms.push_back({tw.at(0).get<std::string>(), tw.at(1).get<double>()});
    tree.nodes.push_back(std::move(node));
  }
  if (tree.root >= tree.nodes.size()) throw Error("index file: root id out of range");

  // Document sets, children before parents.
  std::vector<char> done(tree.nodes.size(), 0);
  std::vector<std::pair<NodeId, bool>> stack{{tree.root, false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    auto& node = tree.nodes[id];
    if (done[id]) throw Error("index file: node " + std::to_string(id) + " reached twice");
    if (!expanded) {
      stack.push_back({id, true});
      for (const auto c : node.children) {
        if (c >= tree.nodes.size()) throw Error("index file: child id out of range");
        stack.push_back({c, false});
      }
      continue;
    }
    node.documents = node.direct_documents;
    for (const auto c : node.children) {
      const auto& cd = tree.nodes[c].documents;
      node.documents.insert(node.documents.end(), cd.begin(), cd.end());
    }
    std::sort(node.documents.begin(), node.documents.end());
    done[id] = 1;
  }

  index.warnings = doc.at("warnings").get<std::vector<std::string>>();
  return index;
}

}  // namespace

HierIndex index_from_json(const json& doc) {
  try {
    return parse_index(doc);
  } catch (const json::exception& e) {
    throw Error("malformed index file: " + std::string(e.what()));
  }
}

void save_index(const HierIndex& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write index file: " + path.string());
  out << to_json(index).dump() << '\n';
  if (!out) throw Error("failed writing index file: " + path.string());
}

HierIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read index file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("index file is not valid JSON: " + std::string(e.what()));
  }
  return index_from_json(doc);
}

}  // namespace hierindex
