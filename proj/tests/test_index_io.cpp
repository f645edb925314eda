#include <doctest.h>

#include <fstream>
#include <iterator>

#include "hierindex/index.hpp"
#include "support/synthetic.hpp"

using namespace hierindex;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

HierIndex small_index(std::uint64_t seed = 42) {
  BuildConfig config;
  config.topics = 8;
  config.svd.seed = seed;
  config.tree.split.seed = seed;
  return build_index(testing::topic_corpus(3, 20, 11), config);
}

}  // namespace

TEST_CASE("build_index wires the pipeline together") {
  const auto index = small_index();
  CHECK(index.lsi.k == 8);
  CHECK(index.doc_ids.size() == 60);
  CHECK(index.doc_vectors.cols() == 60);
  CHECK(index.lsi.vocabulary_fingerprint == vocabulary_fingerprint(index.vocabulary));
  CHECK(index.tree.num_documents == 60);
  for (const auto& n : index.tree.nodes) {
    CHECK_FALSE(n.top_terms.empty());
    CHECK(n.top_terms.size() <= 10);
  }
  CHECK(index.doc_labels[0] == std::optional<std::string>("topic0"));
}

TEST_CASE("save and load round-trip") {
  const auto index = small_index();
  const auto dir = testing::scratch_dir("index_io");
  save_index(index, dir / "a.json");
  const auto loaded = load_index(dir / "a.json");

  CHECK(loaded.vocabulary.terms == index.vocabulary.terms);
  CHECK(loaded.vocabulary.doc_freq == index.vocabulary.doc_freq);
  CHECK(loaded.idf == index.idf);
  CHECK(loaded.lsi.term_factors == index.lsi.term_factors);
  CHECK(loaded.lsi.singular_values == index.lsi.singular_values);
  CHECK(loaded.lsi.vocabulary_fingerprint == index.lsi.vocabulary_fingerprint);
  CHECK(loaded.doc_vectors == index.doc_vectors);
  CHECK(loaded.doc_ids == index.doc_ids);
  CHECK(loaded.doc_labels == index.doc_labels);
  CHECK(loaded.config.tree.beta == index.config.tree.beta);
  CHECK(loaded.config.preprocess.stopwords == index.config.preprocess.stopwords);
  REQUIRE(loaded.tree.nodes.size() == index.tree.nodes.size());
  CHECK(loaded.tree.root == index.tree.root);
  for (std::size_t i = 0; i < index.tree.nodes.size(); ++i) {
    const auto& a = index.tree.nodes[i];
    const auto& b = loaded.tree.nodes[i];
    CHECK(a.children == b.children);
    CHECK(a.documents == b.documents);
    CHECK(a.direct_documents == b.direct_documents);
    CHECK(a.level == b.level);
    CHECK(a.gaussian.centroid == b.gaussian.centroid);
    CHECK(a.gaussian.covariance == b.gaussian.covariance);
    CHECK(a.gaussian.ridge == b.gaussian.ridge);
    CHECK(a.gaussian.precision == b.gaussian.precision);
  }

  // Queries route identically, and re-saving reproduces the bytes.
  for (const char* q : {"orbit launch", "hockey puck", "god faith", ""}) {
    const auto x = categorize_text(index, q);
    const auto y = categorize_text(loaded, q);
    CHECK(x.node == y.node);
    CHECK(x.path.size() == y.path.size());
  }
  save_index(loaded, dir / "b.json");
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
}

TEST_CASE("identical builds give identical bytes") {
  const auto dir = testing::scratch_dir("index_bytes");
  save_index(small_index(), dir / "a.json");
  save_index(small_index(), dir / "b.json");
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  save_index(small_index(7), dir / "c.json");
  CHECK(slurp(dir / "a.json") != slurp(dir / "c.json"));
}

TEST_CASE("metadata records the model conventions") {
  const auto j = to_json(small_index());
  CHECK(j.at("format") == kIndexFormat);
  CHECK(j.at("lsi").at("convention") == kProjectionConvention);
  CHECK(j.at("build_params").at("covariance") == "population");
  CHECK(j.at("build_params").at("pddp_offset") == "mean_abs_centered_projection");
}

TEST_CASE("malformed index files are rejected") {
  const auto dir = testing::scratch_dir("index_bad");
  CHECK_THROWS_AS(load_index(dir / "missing.json"), Error);
  std::ofstream(dir / "junk.json") << "{not json";
  CHECK_THROWS_AS(load_index(dir / "junk.json"), Error);

  auto j = to_json(small_index());
  auto wrong_format = j;
  wrong_format["format"] = "other/2";
  CHECK_THROWS_AS(index_from_json(wrong_format), Error);

  auto wrong_vocab = j;
  wrong_vocab["vocabulary"]["terms"][0] = "zzzzz";
  CHECK_THROWS_AS(index_from_json(wrong_vocab), Error);

  auto bad_child = j;
  bad_child["tree"]["nodes"][bad_child["tree"]["root"].get<std::size_t>()]["children"][0] = 100000;
  CHECK_THROWS_AS(index_from_json(bad_child), Error);

  auto missing = j;
  missing.erase("lsi");
  CHECK_THROWS_AS(index_from_json(missing), Error);
}
