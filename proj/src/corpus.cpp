#include "hierindex/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "hierindex/porter.hpp"

namespace hierindex {
namespace fs = std::filesystem;

std::optional<std::size_t> Vocabulary::find(std::string_view term) const {
  const auto it = std::lower_bound(terms.begin(), terms.end(), term);
  if (it == terms.end() || *it != term) return std::nullopt;
  return static_cast<std::size_t>(it - terms.begin());
}

namespace {

bool looks_like_header(std::string_view line) {
  const auto colon = line.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  return std::all_of(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(colon), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-';
  });
}

void note(IngestReport* report, std::string message) {
  if (report) report->warnings.push_back(std::move(message));
}

}  // namespace

std::string strip_header_block(std::string_view text) {
  const auto first_eol = text.find('\n');
  if (!looks_like_header(text.substr(0, first_eol))) return std::string(text);
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    if (line.find_first_not_of(" \t") == std::string_view::npos) break;
  }
  return pos >= text.size() ? std::string() : std::string(text.substr(pos));
}

std::vector<RawDocument> load_corpus(const fs::path& root, const LoadOptions& options,
                                     IngestReport* report) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error("corpus directory not readable: " + root.string());

  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw Error("corpus directory not readable: " + root.string() + ": " + ec.message());
  for (const auto& entry : it) {
    if (entry.is_regular_file(ec)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<RawDocument> docs;
  docs.reserve(files.size());
  for (const auto& file : files) {
    const fs::path rel = file.lexically_relative(root);
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      if (report) report->skipped_files.push_back(rel.generic_string());
      note(report, "skipped unreadable file " + rel.generic_string());
      continue;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.find('\0') != std::string::npos) {
      if (report) report->skipped_files.push_back(rel.generic_string());
      note(report, "skipped binary file " + rel.generic_string());
      continue;
    }
    RawDocument doc;
    doc.id = rel.generic_string();
    doc.text = options.strip_headers ? strip_header_block(text) : std::move(text);
    if (options.layout == CorpusLayout::kNewsgroups) {
      if (std::distance(rel.begin(), rel.end()) >= 2) {
        doc.label = rel.begin()->string();
      } else {
        note(report, "file outside a class directory: " + doc.id);
      }
    }
    docs.push_back(std::move(doc));
  }
  if (docs.empty()) note(report, "no documents found under " + root.string());
  return docs;
}

std::vector<std::string> preprocess(std::string_view text, const PreprocessConfig& config) {
  std::vector<std::string> terms;
  std::string token;
  auto flush = [&] {
    if (token.size() >= config.min_token_len && !config.stopwords.contains(token)) {
      terms.push_back(porter_stem(token));
    }
    token.clear();
  };
  for (const char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (uc < 0x80 && std::isalpha(uc)) {
      token.push_back(static_cast<char>(std::tolower(uc)));
    } else if (!token.empty()) {
      flush();
    }
  }
  if (!token.empty()) flush();
  return terms;
}

CorpusMatrix build_matrix(const std::vector<RawDocument>& docs, const PreprocessConfig& config,
                          IngestReport* report) {
  const std::size_t n = docs.size();
  if (n < 2) throw Error("build_matrix needs at least 2 documents, got " + std::to_string(n));

  std::vector<std::map<std::string, std::size_t>> counts(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t d = 0; d < static_cast<std::ptrdiff_t>(n); ++d) {
    auto& bag = counts[static_cast<std::size_t>(d)];
    for (auto& term : preprocess(docs[static_cast<std::size_t>(d)].text, config)) ++bag[std::move(term)];
  }

  std::map<std::string, std::size_t> df;
  for (const auto& bag : counts) {
    for (const auto& [term, count] : bag) ++df[term];
  }
  if (df.empty()) throw Error("all " + std::to_string(n) + " documents are empty after preprocessing");

  CorpusMatrix out;
  auto& vocab = out.vocabulary;
  const double max_df = config.max_df_fraction * static_cast<double>(n);
  for (const auto& [term, freq] : df) {
    if (freq < config.min_df || static_cast<double>(freq) > max_df) continue;
    vocab.terms.push_back(term);
    vocab.doc_freq.push_back(freq);
  }
  if (vocab.terms.empty()) {
    throw Error("no term survives pruning (min_df=" + std::to_string(config.min_df) +
                ", max_df_fraction=" + std::to_string(config.max_df_fraction) + ")");
  }

  auto& m = out.matrix;
  m.idf.resize(static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t t = 0; t < vocab.size(); ++t) {
    m.idf[static_cast<Eigen::Index>(t)] =
        std::log(static_cast<double>(n) / static_cast<double>(vocab.doc_freq[t]));
  }

  std::vector<Eigen::Triplet<double>> triplets;
  m.column_ids.reserve(n);
  for (std::size_t d = 0; d < n; ++d) {
    m.column_ids.push_back(docs[d].id);
    bool any = false;
    for (const auto& [term, count] : counts[d]) {
      const auto t = vocab.find(term);
      if (!t) continue;
      any = true;
      const double w = static_cast<double>(count) * m.idf[static_cast<Eigen::Index>(*t)];
      if (w != 0.0) {
        triplets.emplace_back(static_cast<Eigen::Index>(*t), static_cast<Eigen::Index>(d), w);
      }
    }
    if (!any && report) {
      report->empty_documents.push_back(docs[d].id);
      report->warnings.push_back("document has no retained term: " + docs[d].id);
    }
  }
  m.weights.resize(static_cast<Eigen::Index>(vocab.size()), static_cast<Eigen::Index>(n));
  m.weights.setFromTriplets(triplets.begin(), triplets.end());
  m.weights.makeCompressed();
  return out;
}

Eigen::SparseVector<double> term_weights(std::string_view text, const Vocabulary& vocabulary,
                                         const Vector& idf, const PreprocessConfig& config) {
  std::map<std::size_t, std::size_t> counts;
  for (const auto& term : preprocess(text, config)) {
    if (const auto t = vocabulary.find(term)) ++counts[*t];
  }
  Eigen::SparseVector<double> q(static_cast<Eigen::Index>(vocabulary.size()));
  for (const auto& [t, count] : counts) {
    const double w = static_cast<double>(count) * idf[static_cast<Eigen::Index>(t)];
    if (w != 0.0) q.insertBack(static_cast<Eigen::Index>(t)) = w;
  }
  return q;
}

}  // namespace hierindex
