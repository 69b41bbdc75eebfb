#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace offlang {

struct Dataset;  // corpus.hpp

// Tweet normalization: lowercase, drop @-prefixed tokens whole, map every
// character outside [a-z] to a space (the '#' marker goes, the tag body
// stays), collapse whitespace, trim. Total and idempotent.
// With drop_hashtag_body the whole #token is removed instead.
std::string clean(std::string_view raw, bool drop_hashtag_body = false);

// Whitespace split, no empty tokens.
std::vector<std::string> tokenize(std::string_view cleaned);

// Classic Porter (1980) five-step suffix stripper, matching the reference
// implementation behind the published test vocabulary (including its two
// documented step-2 departures and the length<=2 early exit).
// Expects a lowercase alphabetic token.
std::string porter_stem(std::string_view word);

// Irregular-verb exception table for the rule-based lemmatizer.
// File format: one `inflected<TAB>lemma` per line, '#' comments allowed.
class VerbLexicon {
 public:
  VerbLexicon() = default;

  static const VerbLexicon& builtin();
  static VerbLexicon from_file(const std::string& path);
  static VerbLexicon from_pairs(
      std::vector<std::pair<std::string, std::string>> pairs);

  const std::string* find(const std::string& word) const;
  std::size_t size() const { return map_.size(); }

  // Entries sorted by inflected form (stable serialization order).
  std::vector<std::pair<std::string, std::string>> sorted_entries() const;

 private:
  std::unordered_map<std::string, std::string> map_;
};

// Verb lemmatization: exception table first, then ordered suffix rules
// (ies->y, es, s, ing, ed) with doubled-consonant undo and e-restore.
// Results shorter than 2 characters are rejected and the word is returned
// unchanged.
std::string lemmatize_verb(std::string_view word, const VerbLexicon& lexicon);

enum class ReduceMode { none, stem, lemma };

ReduceMode reduce_mode_from_string(const std::string& s);
std::string to_string(ReduceMode mode);

// Word <-> index maps with reserved PAD/OOV slots.
struct Vocabulary {
  static constexpr int pad_index = 0;
  static constexpr int oov_index = 1;

  std::unordered_map<std::string, int> word_to_index;
  std::vector<std::string> index_to_word;  // [0] and [1] are sentinels

  // Distinct real words.
  std::size_t size() const { return word_to_index.size(); }
  // Total index slots including PAD and OOV; embedding row count.
  std::size_t rows() const { return word_to_index.size() + 2; }

  bool contains(const std::string& word) const {
    return word_to_index.count(word) != 0;
  }
  int index_of(const std::string& word) const {
    auto it = word_to_index.find(word);
    return it == word_to_index.end() ? oov_index : it->second;
  }
};

// Distinct tokens in first-occurrence order, indices starting at 2.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus);

// Zero-padded index encoding of one token list.
struct IndexSequence {
  std::vector<int> indices;  // fixed length max_len
  int true_length = 0;

  bool operator==(const IndexSequence&) const = default;
};

IndexSequence encode_padded(const std::vector<std::string>& tokens,
                            const Vocabulary& vocab, std::size_t max_len);

std::size_t max_corpus_length(const std::vector<std::vector<std::string>>& corpus);

// clean -> tokenize -> per-token reduction, one list per raw text.
std::vector<std::string> preprocess_text(std::string_view raw, ReduceMode mode,
                                         const VerbLexicon& lexicon,
                                         bool drop_hashtag_body = false);

std::vector<std::vector<std::string>> preprocess_corpus(
    const Dataset& ds, ReduceMode mode, const VerbLexicon& lexicon,
    bool drop_hashtag_body = false);

}  // namespace offlang
