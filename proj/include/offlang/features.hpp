#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "offlang/preprocess.hpp"

namespace offlang {

// Sparse feature vector: (column, value) pairs with strictly increasing
// columns and no explicit zeros.
struct SparseVector {
  std::vector<std::pair<int, double>> pairs;

  double at(int column) const;
  bool operator==(const SparseVector&) const = default;
};

// Smooth TF-IDF model: idf[t] = ln(n_docs / (df[t] + 1)). Negative values
// (df == n) are kept.
struct TfidfModel {
  std::unordered_map<std::string, int> term_to_column;
  std::vector<std::string> terms;  // column order = first occurrence
  std::vector<long> df;            // tweets containing the term
  std::vector<double> idf;
  std::size_t n_docs = 0;

  std::size_t n_features() const { return terms.size(); }
};

TfidfModel fit_tfidf(const std::vector<std::vector<std::string>>& corpus);

// value = count(t in tokens) * idf[t]; unseen terms are skipped and exact
// zero products are omitted.
SparseVector transform_tfidf(const TfidfModel& model,
                             const std::vector<std::string>& tokens);

std::vector<SparseVector> transform_tfidf_batch(
    const TfidfModel& model, const std::vector<std::vector<std::string>>& corpus);

// Elementwise encode_padded over a token-list batch.
std::vector<IndexSequence> encode_batch(
    const std::vector<std::vector<std::string>>& corpus, const Vocabulary& vocab,
    std::size_t max_len);

}  // namespace offlang
