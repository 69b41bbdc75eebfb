#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "offlang/errors.hpp"
#include "offlang/features.hpp"
#include "offlang/rng.hpp"

using namespace offlang;

namespace {

// Independent brute force: recount TF and DF from scratch per query.
std::map<std::string, double> brute_force_tfidf(
    const std::vector<std::vector<std::string>>& corpus,
    const std::vector<std::string>& tokens) {
  std::map<std::string, double> out;
  const double n = static_cast<double>(corpus.size());
  for (const auto& tok : tokens) {
    bool fitted = false;
    for (const auto& doc : corpus)
      for (const auto& t : doc)
        if (t == tok) fitted = true;
    if (!fitted) continue;
    long tf = 0;
    for (const auto& t : tokens) tf += (t == tok);
    long df = 0;
    for (const auto& doc : corpus) {
      bool contains = false;
      for (const auto& t : doc) contains |= (t == tok);
      df += contains;
    }
    double value = static_cast<double>(tf) * std::log(n / (static_cast<double>(df) + 1.0));
    if (value != 0.0) out[tok] = value;
  }
  return out;
}

const std::vector<std::vector<std::string>> kSmallCorpus = {
    {"dog", "cat"}, {"dog"}, {"bird"}};

}  // namespace

TEST_CASE("fit_tfidf: formula values on the three-doc corpus") {
  auto model = fit_tfidf(kSmallCorpus);
  CHECK(model.n_docs == 3);
  CHECK(model.df[model.term_to_column.at("dog")] == 2);
  CHECK(model.idf[model.term_to_column.at("dog")] ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(model.idf[model.term_to_column.at("bird")] ==
        doctest::Approx(std::log(1.5)).epsilon(1e-12));
  CHECK(model.idf[model.term_to_column.at("cat")] ==
        doctest::Approx(std::log(1.5)).epsilon(1e-12));
}

TEST_CASE("fit_tfidf: negative idf when a term is in every doc") {
  auto model = fit_tfidf({{"x", "a"}, {"x", "b"}, {"x", "c"}});
  CHECK(model.idf[model.term_to_column.at("x")] ==
        doctest::Approx(std::log(3.0 / 4.0)).epsilon(1e-12));
  CHECK(model.idf[model.term_to_column.at("x")] < 0.0);
}

TEST_CASE("fit_tfidf: first-occurrence column order and errors") {
  auto model = fit_tfidf(kSmallCorpus);
  CHECK(model.terms == std::vector<std::string>{"dog", "cat", "bird"});
  CHECK_THROWS_AS(fit_tfidf({}), ValidationError);
  CHECK_THROWS_AS(fit_tfidf({{}, {}}), ValidationError);
}

TEST_CASE("transform_tfidf: spec examples") {
  auto model = fit_tfidf(kSmallCorpus);
  SUBCASE("repeated term multiplies tf") {
    auto v = transform_tfidf(model, {"bird", "bird"});
    REQUIRE(v.pairs.size() == 1);
    CHECK(v.pairs[0].first == model.term_to_column.at("bird"));
    CHECK(v.pairs[0].second == doctest::Approx(2.0 * std::log(1.5)).epsilon(1e-12));
  }
  SUBCASE("zero idf products are omitted") {
    CHECK(transform_tfidf(model, {"dog"}).pairs.empty());
  }
  SUBCASE("unseen terms are ignored") {
    CHECK(transform_tfidf(model, {"unseenword"}).pairs.empty());
  }
  SUBCASE("empty token list gives the empty vector") {
    CHECK(transform_tfidf(model, {}).pairs.empty());
  }
}

TEST_CASE("transform_tfidf: columns strictly increasing, no zeros") {
  auto model = fit_tfidf({{"a", "b", "c"}, {"c", "d"}, {"e"}});
  auto v = transform_tfidf(model, {"e", "a", "c", "a"});
  for (std::size_t i = 1; i < v.pairs.size(); ++i)
    CHECK(v.pairs[i - 1].first < v.pairs[i].first);
  for (const auto& [col, val] : v.pairs) CHECK(val != 0.0);
}

TEST_CASE("tfidf: oracle equivalence on a random 200-tweet corpus") {
  Rng rng(2024);
  std::vector<std::string> vocab;
  for (int w = 0; w < 50; ++w) vocab.push_back("w" + std::to_string(w));
  std::vector<std::vector<std::string>> corpus;
  for (int d = 0; d < 200; ++d) {
    std::vector<std::string> doc;
    std::size_t len = 1 + rng.uniform_index(20);
    for (std::size_t t = 0; t < len; ++t)
      doc.push_back(vocab[rng.uniform_index(vocab.size())]);
    corpus.push_back(std::move(doc));
  }
  auto model = fit_tfidf(corpus);
  for (int q = 0; q < 40; ++q) {
    const auto& tokens = corpus[rng.uniform_index(corpus.size())];
    auto fast = transform_tfidf(model, tokens);
    auto slow = brute_force_tfidf(corpus, tokens);
    REQUIRE(fast.pairs.size() == slow.size());
    for (const auto& [col, val] : fast.pairs) {
      const auto& term = model.terms[static_cast<std::size_t>(col)];
      REQUIRE(slow.count(term) == 1);
      CHECK(std::abs(val - slow[term]) <= 1e-12);
    }
  }
}

TEST_CASE("tfidf: idf strictly decreases as df increases") {
  // three corpora with the marker term in 1, 2, then 3 of 4 docs
  std::vector<double> idfs;
  for (int df = 1; df <= 3; ++df) {
    std::vector<std::vector<std::string>> corpus(4);
    for (int d = 0; d < 4; ++d) corpus[static_cast<std::size_t>(d)] = {"pad" + std::to_string(d)};
    for (int d = 0; d < df; ++d) corpus[static_cast<std::size_t>(d)].push_back("mark");
    auto model = fit_tfidf(corpus);
    idfs.push_back(model.idf[model.term_to_column.at("mark")]);
  }
  CHECK(idfs[0] > idfs[1]);
  CHECK(idfs[1] > idfs[2]);
}

TEST_CASE("encode_batch matches elementwise encode_padded") {
  auto vocab = build_vocabulary({{"a", "b"}, {"c"}});
  std::vector<std::vector<std::string>> corpus = {{"a"}, {"c", "b"}, {}};
  auto batch = encode_batch(corpus, vocab, 3);
  REQUIRE(batch.size() == 3);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    CHECK(batch[i] == encode_padded(corpus[i], vocab, 3));
  CHECK(batch[2].indices == std::vector<int>{0, 0, 0});
}
