#include "offlang/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "offlang/errors.hpp"

namespace offlang {

double SparseVector::at(int column) const {
  auto it = std::lower_bound(
      pairs.begin(), pairs.end(), column,
      [](const std::pair<int, double>& p, int c) { return p.first < c; });
  return (it != pairs.end() && it->first == column) ? it->second : 0.0;
}

TfidfModel fit_tfidf(const std::vector<std::vector<std::string>>& corpus) {
  if (corpus.empty()) throw ValidationError("fit_tfidf: empty corpus");

  TfidfModel model;
  model.n_docs = corpus.size();
  for (const auto& tokens : corpus) {
    // count each distinct term once per tweet
    std::vector<int> seen;
    for (const auto& token : tokens) {
      auto it = model.term_to_column.find(token);
      int col;
      if (it == model.term_to_column.end()) {
        col = static_cast<int>(model.terms.size());
        model.term_to_column.emplace(token, col);
        model.terms.push_back(token);
        model.df.push_back(0);
      } else {
        col = it->second;
      }
      if (std::find(seen.begin(), seen.end(), col) == seen.end())
        seen.push_back(col);
    }
    for (int col : seen) ++model.df[static_cast<std::size_t>(col)];
  }
  if (model.terms.empty())
    throw ValidationError("fit_tfidf: corpus has no tokens");

  model.idf.resize(model.terms.size());
  const double n = static_cast<double>(model.n_docs);
  for (std::size_t t = 0; t < model.terms.size(); ++t)
    model.idf[t] = std::log(n / (static_cast<double>(model.df[t]) + 1.0));
  return model;
}

SparseVector transform_tfidf(const TfidfModel& model,
                             const std::vector<std::string>& tokens) {
  std::map<int, long> counts;  // ordered: output columns come out sorted
  for (const auto& token : tokens) {
    auto it = model.term_to_column.find(token);
    if (it != model.term_to_column.end()) ++counts[it->second];
  }
  SparseVector out;
  out.pairs.reserve(counts.size());
  for (const auto& [col, count] : counts) {
    double value =
        static_cast<double>(count) * model.idf[static_cast<std::size_t>(col)];
    if (value != 0.0) out.pairs.emplace_back(col, value);
  }
  return out;
}

std::vector<SparseVector> transform_tfidf_batch(
    const TfidfModel& model, const std::vector<std::vector<std::string>>& corpus) {
  std::vector<SparseVector> out;
  out.reserve(corpus.size());
  for (const auto& tokens : corpus) out.push_back(transform_tfidf(model, tokens));
  return out;
}

std::vector<IndexSequence> encode_batch(
    const std::vector<std::vector<std::string>>& corpus, const Vocabulary& vocab,
    std::size_t max_len) {
  std::vector<IndexSequence> out;
  out.reserve(corpus.size());
  for (const auto& tokens : corpus)
    out.push_back(encode_padded(tokens, vocab, max_len));
  return out;
}

}  // namespace offlang
