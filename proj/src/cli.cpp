#include "hierindex/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "hierindex/eval.hpp"
#include "hierindex/index.hpp"

namespace hierindex::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct RunConfig {
  std::string input;
  std::string output;
  std::string index;
  std::string test;
  std::string text;
  std::string file;
  std::string node = "root";
  std::string sweep_out = "sweep.csv";
  std::string stopwords_file;
  std::string layout = "newsgroups";
  std::size_t topics = 20;
  double beta = 0.5;
  std::uint64_t seed = 42;
  std::size_t min_split_size = 4;
  bool literal_eq6 = false;
  bool normalize = false;
  bool keep_headers = false;
  std::size_t min_df = 2;
  double max_df_frac = 0.5;
  std::size_t min_token_len = 2;
  std::size_t top_terms = 10;
  std::vector<std::size_t> topics_list{5, 10, 20, 40};
  std::vector<double> betas_list{0.25, 0.5, 0.75, 1.0};
  std::vector<std::size_t> k_list;
  std::size_t max_kmedoids_docs = 10000;
  bool json_output = false;
  bool quiet = false;
};

class Progress {
 public:
  Progress(std::ostream& err, bool quiet) : err_(err), quiet_(quiet), start_(std::chrono::steady_clock::now()) {}
  template <typename... Args>
  void operator()(fmt::format_string<Args...> f, Args&&... args) {
    if (quiet_) return;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    fmt::print(err_, "[{:7.2f}s] {}\n", s, fmt::format(f, std::forward<Args>(args)...));
  }

 private:
  std::ostream& err_;
  bool quiet_;
  std::chrono::steady_clock::time_point start_;
};

void add_corpus_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--layout", cfg.layout, "Corpus layout")->check(CLI::IsMember({"newsgroups", "flat"}));
  cmd->add_flag("--keep-headers", cfg.keep_headers, "Do not strip leading mail/news header blocks");
}

void add_preprocess_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--min-df", cfg.min_df, "Drop terms in fewer documents")->check(CLI::PositiveNumber);
  cmd->add_option("--max-df-frac", cfg.max_df_frac, "Drop terms in a larger fraction of documents")
      ->check(CLI::Range(0.0, 1.0).description("in (0, 1]"))
      ->check(CLI::PositiveNumber);
  cmd->add_option("--stopwords", cfg.stopwords_file, "Stopword file replacing the built-in list")->check(CLI::ExistingFile);
  cmd->add_option("--min-token-len", cfg.min_token_len, "Shortest token kept")->check(CLI::PositiveNumber);
}

void add_model_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "Seed for every randomized step");
  cmd->add_option("--min-split-size", cfg.min_split_size, "Clusters smaller than this are never split")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  cmd->add_flag("--literal-eq6", cfg.literal_eq6, "PDDP offset from raw (uncentered) projections");
  cmd->add_flag("--normalize", cfg.normalize, "L2-normalize semantic vectors before clustering");
}

// Output paths must land in an existing directory.
const CLI::Validator kWritablePath(
    [](std::string& path) -> std::string {
      const auto parent = fs::absolute(fs::path(path)).parent_path();
      if (fs::is_directory(parent)) return {};
      return "directory does not exist: " + parent.string();
    },
    "PATH");

LoadOptions load_options(const RunConfig& cfg) {
  return {cfg.layout == "flat" ? CorpusLayout::kFlat : CorpusLayout::kNewsgroups, !cfg.keep_headers};
}

BuildConfig build_config(const RunConfig& cfg) {
  BuildConfig b;
  b.topics = cfg.topics;
  b.tree.beta = cfg.beta;
  b.tree.min_split_size = cfg.min_split_size;
  b.tree.split.seed = cfg.seed;
  b.tree.split.literal_offset = cfg.literal_eq6;
  b.svd.seed = cfg.seed;
  b.normalize = cfg.normalize;
  b.top_terms = cfg.top_terms;
  b.preprocess.min_df = cfg.min_df;
  b.preprocess.max_df_fraction = cfg.max_df_frac;
  b.preprocess.min_token_len = cfg.min_token_len;
  if (!cfg.stopwords_file.empty()) b.preprocess.stopwords = load_stopwords(cfg.stopwords_file);
  return b;
}

std::vector<RawDocument> read_corpus(const std::string& dir, const RunConfig& cfg, Progress& progress) {
  IngestReport report;
  auto docs = load_corpus(dir, load_options(cfg), &report);
  for (const auto& w : report.warnings) progress("warning: {}", w);
  progress("loaded {} documents from {}", docs.size(), dir);
  return docs;
}

std::string join_counts(const std::vector<std::size_t>& counts) {
  std::string s;
  for (std::size_t i = counts.size(); i-- > 1;) {
    if (!s.empty()) s += '-';
    s += std::to_string(counts[i]);
  }
  return s;
}

json node_json(const HierIndex& index, NodeId id) {
  const auto& node = index.tree.node(id);
  json terms = json::array();
  for (const auto& t : node.top_terms) terms.push_back({t.term, t.weight});
  json j = {{"id", node.id}, {"level", node.level}, {"size", node.documents.size()},
            {"children", node.children}, {"ridge", node.gaussian.ridge}, {"top_terms", terms}};
  if (node.is_leaf()) {
    json members = json::array();
    for (const auto d : node.documents) members.push_back(index.doc_ids[d]);
    j["documents"] = members;
  }
  return j;
}

std::string terms_line(const ClusterNode& node) {
  std::string s;
  for (const auto& t : node.top_terms) {
    if (!s.empty()) s += ' ';
    s += t.term;
  }
  return s;
}

int cmd_build(const RunConfig& cfg, std::ostream& out, Progress& progress) {
  auto config = build_config(cfg);
  const auto docs = read_corpus(cfg.input, cfg, progress);
  IngestReport report;
  const auto index = build_index(docs, config, &report);
  for (const auto& w : report.warnings) progress("warning: {}", w);
  for (const auto& w : index.warnings) progress("warning: {}", w);
  for (const auto& note : index.tree.notes) progress("note: {}", note);
  save_index(index, cfg.output);
  const auto counts = index.tree.level_counts();
  progress("wrote {}", cfg.output);
  if (cfg.json_output) {
    out << json{{"index", cfg.output},
                {"documents", index.doc_ids.size()},
                {"vocabulary", index.vocabulary.size()},
                {"topics", index.lsi.k},
                {"clusters", index.tree.nodes.size()},
                {"level_counts", counts},
                {"empty_documents", report.empty_documents.size()}}
               .dump()
        << '\n';
  } else {
    fmt::print(out, "documents: {}\nvocabulary: {}\ntopics: {}\nclusters: {}\nlevels: {}\nlevel breakup (root to leaves): {}\n",
               index.doc_ids.size(), index.vocabulary.size(), index.lsi.k, index.tree.nodes.size(), counts.size() - 1,
               join_counts(counts));
  }
  return kExitOk;
}

int cmd_query(const RunConfig& cfg, std::ostream& out, Progress& progress) {
  std::string text = cfg.text;
  if (!cfg.file.empty()) {
    std::ifstream in(cfg.file, std::ios::binary);
    if (!in) throw Error("cannot read query file: " + cfg.file);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  const auto index = load_index(cfg.index);
  progress("loaded index {}", cfg.index);
  const auto result = categorize_text(index, text);
  for (const auto& w : result.warnings) progress("warning: {}", w);
  const auto& target = index.tree.node(result.node);
  if (cfg.json_output) {
    json path = json::array();
    for (const auto& step : result.path) {
      json s = {{"node", step.node}, {"level", index.tree.node(step.node).level}, {"distance", step.distance}};
      if (step.best_child) {
        s["best_child"] = *step.best_child;
        s["best_child_distance"] = step.best_child_distance;
      }
      path.push_back(s);
    }
    out << json{{"node", result.node}, {"path", path}, {"target", node_json(index, result.node)}, {"warnings", result.warnings}}.dump()
        << '\n';
  } else {
    for (const auto& step : result.path) {
      fmt::print(out, "node {} (level {}) distance {:.6g}", step.node, index.tree.node(step.node).level, step.distance);
      if (step.best_child) fmt::print(out, "; nearest child {} at {:.6g}", *step.best_child, step.best_child_distance);
      out << '\n';
    }
    fmt::print(out, "target: node {} (level {}, {} documents)\ntop terms: {}\n", target.id, target.level,
               target.documents.size(), terms_line(target));
    for (const auto& w : result.warnings) fmt::print(out, "warning: {}\n", w);
  }
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, Progress& progress) {
  const auto index = load_index(cfg.index);
  progress("loaded index {}", cfg.index);
  const auto test_docs = read_corpus(cfg.test, cfg, progress);
  const auto test_vectors = embed_documents(index, test_docs);
  const auto accuracy = accuracy_protocol(index.tree, index.doc_vectors, test_vectors);
  progress("accuracy {:.2f}% ({} / {})", accuracy.percent, accuracy.correct, accuracy.total);

  json report = {{"accuracy", accuracy.percent}, {"correct", accuracy.correct}, {"test_documents", accuracy.total},
                 {"f_aggregation", "class-weighted max over clusters of 2PR/(P+R)"}};
  const auto class_of = class_ids(index.doc_labels);
  const bool labeled = std::any_of(class_of.begin(), class_of.end(), [](const auto& c) { return c.has_value(); });
  json comparisons = json::array();
  if (labeled) {
    const auto level1 = level1_partition(index.tree);
    report["f_measure_level1"] = f_measure(contingency(level1, class_of));
    report["f_measure_tree"] = tree_f_measure(index.tree, class_of);
    auto ks = cfg.k_list;
    if (ks.empty()) ks.push_back(level1.size());
    const auto n = static_cast<std::size_t>(index.doc_vectors.cols());
    for (const auto k : ks) {
      if (k == 0 || k > n) {
        progress("warning: skipping k={} (must be in [1, {}])", k, n);
        continue;
      }
      json row = {{"k", k}};
      const auto km = kmeans_baseline(index.doc_vectors, k, cfg.seed);
      row["kmeans"] = f_measure(contingency(km.clustering.clusters, class_of));
      if (n <= cfg.max_kmedoids_docs) {
        const auto pam = kmedoids_baseline(index.doc_vectors, k, cfg.seed);
        row["kmedoids"] = f_measure(contingency(pam.clustering.clusters, class_of));
      } else {
        progress("warning: k-medoids skipped, {} documents exceed --max-kmedoids-docs", n);
        row["kmedoids"] = nullptr;
      }
      progress("baselines at k={} done", k);
      comparisons.push_back(row);
    }
  }
  report["baselines"] = comparisons;
  if (cfg.json_output) {
    out << report.dump() << '\n';
  } else {
    fmt::print(out, "accuracy: {:.2f}% ({} of {})\n", accuracy.percent, accuracy.correct, accuracy.total);
    if (labeled) {
      fmt::print(out, "F-measure (level-1 clusters): {:.4f}\nF-measure (all tree nodes): {:.4f}\n",
                 report["f_measure_level1"].get<double>(), report["f_measure_tree"].get<double>());
      for (const auto& row : comparisons) {
        fmt::print(out, "k={}: kmeans F={:.4f} kmedoids F={}\n", row["k"].get<std::size_t>(), row["kmeans"].get<double>(),
                   row["kmedoids"].is_null() ? std::string("n/a") : fmt::format("{:.4f}", row["kmedoids"].get<double>()));
      }
    }
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, Progress& progress) {
  const auto train = read_corpus(cfg.input, cfg, progress);
  std::vector<RawDocument> test;
  if (!cfg.test.empty()) test = read_corpus(cfg.test, cfg, progress);
  SweepConfig sc{cfg.topics_list, cfg.betas_list, build_config(cfg)};
  const auto rows = sweep(train, test, sc);
  std::ofstream csv(cfg.sweep_out);
  if (!csv) throw Error("cannot write " + cfg.sweep_out);
  csv << sweep_csv_header() << '\n';
  for (const auto& r : rows) csv << sweep_csv_row(r) << '\n';
  progress("wrote {} rows to {}", rows.size(), cfg.sweep_out);
  out << sweep_csv_header() << '\n';
  for (const auto& r : rows) out << sweep_csv_row(r) << '\n';
  return kExitOk;
}

void print_outline(const HierIndex& index, NodeId id, int depth, std::ostream& out) {
  const auto& node = index.tree.node(id);
  fmt::print(out, "{:{}}node {} [level {}, {} docs] {}\n", "", depth * 2, node.id, node.level, node.documents.size(),
             terms_line(node));
  for (const auto c : node.children) print_outline(index, c, depth + 1, out);
}

int cmd_inspect(const RunConfig& cfg, std::ostream& out, Progress& progress) {
  const auto index = load_index(cfg.index);
  progress("loaded index {}", cfg.index);
  const auto counts = index.tree.level_counts();
  if (cfg.node == "tree") {
    if (cfg.json_output) {
      json nodes = json::array();
      for (const auto& n : index.tree.nodes) nodes.push_back(node_json(index, n.id));
      out << json{{"root", index.tree.root}, {"level_counts", counts}, {"nodes", nodes}}.dump() << '\n';
    } else {
      fmt::print(out, "documents: {}\nclusters: {}\nlevel breakup (root to leaves): {}\n", index.tree.num_documents,
                 index.tree.nodes.size(), join_counts(counts));
      print_outline(index, index.tree.root, 0, out);
    }
    return kExitOk;
  }
  NodeId id = index.tree.root;
  if (cfg.node != "root") {
    std::size_t used = 0;
    unsigned long long parsed = 0;
    try {
      parsed = std::stoull(cfg.node, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cfg.node.size() || parsed >= index.tree.nodes.size()) throw Error("unknown node id: " + cfg.node);
    id = static_cast<NodeId>(parsed);
  }
  const auto& node = index.tree.node(id);
  if (cfg.json_output) {
    auto j = node_json(index, id);
    j["level_counts"] = counts;
    out << j.dump() << '\n';
    return kExitOk;
  }
  fmt::print(out, "node {}{}\nlevel: {}\ndocuments: {}\nchildren: {}\n", node.id, id == index.tree.root ? " (root)" : "",
             node.level, node.documents.size(), node.children.size());
  for (const auto c : node.children) {
    fmt::print(out, "  child {} [level {}, {} docs]\n", c, index.tree.node(c).level, index.tree.node(c).documents.size());
  }
  fmt::print(out, "top terms:");
  for (const auto& t : node.top_terms) fmt::print(out, " {}({:.3f})", t.term, t.weight);
  out << '\n';
  if (node.is_leaf()) {
    out << "members:";
    for (const auto d : node.documents) out << ' ' << index.doc_ids[d];
    out << '\n';
  }
  fmt::print(out, "level breakup (root to leaves): {}\n", join_counts(counts));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Hierarchical document index: LSI + quality-driven divisive clustering", "hierindex"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", cfg.json_output, "Machine-readable output");
  app.add_flag("-q,--quiet", cfg.quiet, "No progress messages");

  auto* build = app.add_subcommand("build", "Build an index from a corpus directory");
  build->add_option("--input", cfg.input, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  build->add_option("--output", cfg.output, "Index file to write")->required()->check(kWritablePath);
  build->add_option("--topics", cfg.topics, "Number of LSI topics")->check(CLI::PositiveNumber);
  build->add_option("--beta", cfg.beta, "Decay factor of the stopping rule")->check(CLI::PositiveNumber);
  build->add_option("--top-terms", cfg.top_terms, "Top terms stored per node");
  add_model_flags(build, cfg);
  add_preprocess_flags(build, cfg);
  add_corpus_flags(build, cfg);

  auto* query = app.add_subcommand("query", "Categorize a text into an index");
  query->add_option("--index", cfg.index, "Index file")->required()->check(CLI::ExistingFile);
  auto* text_opt = query->add_option("--text", cfg.text, "Query text");
  auto* file_opt = query->add_option("--file", cfg.file, "Query file")->check(CLI::ExistingFile);
  text_opt->excludes(file_opt);

  auto* eval = app.add_subcommand("eval", "Accuracy protocol and F-measure comparison");
  eval->add_option("--index", cfg.index, "Index file")->required()->check(CLI::ExistingFile);
  eval->add_option("--test", cfg.test, "Held-out corpus directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--k-list", cfg.k_list, "Baseline cluster counts (default: level-1 cluster count)")->delimiter(',');
  eval->add_option("--seed", cfg.seed, "K-Means seed");
  eval->add_option("--max-kmedoids-docs", cfg.max_kmedoids_docs, "Skip k-medoids above this corpus size");
  add_corpus_flags(eval, cfg);

  auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep over topics and beta");
  sweep_cmd->add_option("--input", cfg.input, "Training corpus directory")->required()->check(CLI::ExistingDirectory);
  sweep_cmd->add_option("--test", cfg.test, "Held-out corpus for the accuracy column")->check(CLI::ExistingDirectory);
  sweep_cmd->add_option("--topics", cfg.topics_list, "Topic counts")->delimiter(',')->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--betas", cfg.betas_list, "Decay factors")->delimiter(',')->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", cfg.sweep_out, "CSV output file")->check(kWritablePath);
  add_model_flags(sweep_cmd, cfg);
  add_preprocess_flags(sweep_cmd, cfg);
  add_corpus_flags(sweep_cmd, cfg);

  auto* inspect = app.add_subcommand("inspect", "Describe an index, a node, or the whole tree");
  inspect->add_option("--index", cfg.index, "Index file")->required()->check(CLI::ExistingFile);
  inspect->add_option("--node", cfg.node, "Node id, 'root', or 'tree'");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (query->parsed() && text_opt->count() == 0 && file_opt->count() == 0) {
      throw CLI::RequiredError("query needs --text or --file");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: usage: {}\n", e.what());
    err << app.help();
    return kExitUsage;
  }

  Progress progress(err, cfg.quiet);
  try {
    if (build->parsed()) return cmd_build(cfg, out, progress);
    if (query->parsed()) return cmd_query(cfg, out, progress);
    if (eval->parsed()) return cmd_eval(cfg, out, progress);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg, out, progress);
    if (inspect->parsed()) return cmd_inspect(cfg, out, progress);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    fmt::print(err, "error: runtime: {}\n", msg);
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace hierindex::cli
