#include "offlang/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "offlang/corpus.hpp"
#include "offlang/errors.hpp"

namespace offlang {

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

}  // namespace

std::string clean(std::string_view raw, bool drop_hashtag_body) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  const std::size_t n = raw.size();
  while (i < n) {
    while (i < n && is_ascii_space(raw[i])) ++i;
    if (i >= n) break;
    std::size_t j = i;
    while (j < n && !is_ascii_space(raw[j])) ++j;
    std::string_view tok = raw.substr(i, j - i);
    i = j;
    if (tok.front() == '@') continue;  // user references go whole
    if (drop_hashtag_body && tok.front() == '#') continue;
    for (char c : tok) {
      char lc = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
      if (lc >= 'a' && lc <= 'z') {
        out.push_back(lc);
      } else if (!out.empty() && out.back() != ' ') {
        out.push_back(' ');
      }
    }
    if (!out.empty() && out.back() != ' ') out.push_back(' ');
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> tokenize(std::string_view cleaned) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = cleaned.size();
  while (i < n) {
    while (i < n && is_ascii_space(cleaned[i])) ++i;
    if (i >= n) break;
    std::size_t j = i;
    while (j < n && !is_ascii_space(cleaned[j])) ++j;
    tokens.emplace_back(cleaned.substr(i, j - i));
    i = j;
  }
  return tokens;
}

const VerbLexicon& VerbLexicon::builtin() {
  static const VerbLexicon lex = [] {
    extern const char* kBuiltinVerbExceptions;  // verb_lexicon_data.cpp
    VerbLexicon out;
    std::istringstream in(kBuiltinVerbExceptions);
    std::string line;
    while (std::getline(in, line)) {
      auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      out.map_.emplace(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
  }();
  return lex;
}

VerbLexicon VerbLexicon::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open verb-exception table: " + path);
  VerbLexicon out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto tab = line.find('\t', first);
    if (tab == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected inflected<TAB>lemma");
    std::string inflected = line.substr(first, tab - first);
    std::string lemma = line.substr(tab + 1);
    while (!lemma.empty() && (lemma.back() == ' ' || lemma.back() == '\t'))
      lemma.pop_back();
    if (inflected.empty() || lemma.empty())
      throw ParseError(path + ":" + std::to_string(lineno) + ": empty field");
    if (!out.map_.emplace(inflected, lemma).second)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": duplicate entry for '" + inflected + "'");
  }
  return out;
}

VerbLexicon VerbLexicon::from_pairs(
    std::vector<std::pair<std::string, std::string>> pairs) {
  VerbLexicon out;
  for (auto& [inflected, lemma] : pairs)
    out.map_.emplace(std::move(inflected), std::move(lemma));
  return out;
}

const std::string* VerbLexicon::find(const std::string& word) const {
  auto it = map_.find(word);
  return it == map_.end() ? nullptr : &it->second;
}

std::vector<std::pair<std::string, std::string>> VerbLexicon::sorted_entries()
    const {
  std::vector<std::pair<std::string, std::string>> out(map_.begin(), map_.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Stem ends consonant-vowel-consonant with the final consonant not w/x/y;
// the shape that lost a trailing 'e' to the inflection (mak-ing, hop-ed).
bool restore_e(const std::string& stem) {
  if (stem.size() < 3) return false;
  char c2 = stem[stem.size() - 1];
  char v = stem[stem.size() - 2];
  char c1 = stem[stem.size() - 3];
  return !is_vowel(c2) && c2 != 'w' && c2 != 'x' && c2 != 'y' && is_vowel(v) &&
         !is_vowel(c1);
}

bool doubled_consonant(const std::string& stem) {
  if (stem.size() < 2) return false;
  char c = stem[stem.size() - 1];
  if (c != stem[stem.size() - 2] || is_vowel(c)) return false;
  // ll/ss/zz are legitimate endings (fall, miss, buzz)
  return c != 'l' && c != 's' && c != 'z';
}

std::string strip_ing_or_ed(const std::string& word, std::size_t suffix_len) {
  std::string stem = word.substr(0, word.size() - suffix_len);
  if (doubled_consonant(stem)) {
    stem.pop_back();
  } else if (restore_e(stem)) {
    stem.push_back('e');
  }
  return stem;
}

}  // namespace

std::string lemmatize_verb(std::string_view word_sv, const VerbLexicon& lexicon) {
  std::string word(word_sv);
  if (const std::string* lemma = lexicon.find(word)) return *lemma;

  std::string candidate;
  if (ends_with(word, "ies")) {
    candidate = word.substr(0, word.size() - 3) + "y";
  } else if (ends_with(word, "es")) {
    std::string stem = word.substr(0, word.size() - 2);
    // sibilant and -o stems take a bare "es" (watches, passes, goes);
    // everything else only sheds the "s" (makes -> make)
    if (ends_with(stem, "s") || ends_with(stem, "x") || ends_with(stem, "z") ||
        ends_with(stem, "ch") || ends_with(stem, "sh") || ends_with(stem, "o"))
      candidate = stem;
    else
      candidate = word.substr(0, word.size() - 1);
  } else if (ends_with(word, "s") && !ends_with(word, "ss")) {
    candidate = word.substr(0, word.size() - 1);
  } else if (ends_with(word, "ing")) {
    candidate = strip_ing_or_ed(word, 3);
  } else if (ends_with(word, "ed")) {
    candidate = strip_ing_or_ed(word, 2);
  } else {
    return word;
  }
  return candidate.size() >= 2 ? candidate : word;
}

ReduceMode reduce_mode_from_string(const std::string& s) {
  if (s == "none") return ReduceMode::none;
  if (s == "stem") return ReduceMode::stem;
  if (s == "lemma") return ReduceMode::lemma;
  throw ValidationError("unknown preprocess mode: '" + s +
                        "' (expected none|stem|lemma)");
}

std::string to_string(ReduceMode mode) {
  switch (mode) {
    case ReduceMode::none: return "none";
    case ReduceMode::stem: return "stem";
    case ReduceMode::lemma: return "lemma";
  }
  return "none";
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus) {
  Vocabulary vocab;
  vocab.index_to_word = {"<pad>", "<oov>"};
  for (const auto& tokens : corpus) {
    for (const auto& token : tokens) {
      if (vocab.word_to_index.count(token)) continue;
      int index = static_cast<int>(vocab.index_to_word.size());
      vocab.word_to_index.emplace(token, index);
      vocab.index_to_word.push_back(token);
    }
  }
  return vocab;
}

IndexSequence encode_padded(const std::vector<std::string>& tokens,
                            const Vocabulary& vocab, std::size_t max_len) {
  if (max_len < 1) throw ValidationError("encode_padded: max_len must be >= 1");
  IndexSequence seq;
  seq.indices.assign(max_len, Vocabulary::pad_index);
  std::size_t keep = std::min(tokens.size(), max_len);
  for (std::size_t t = 0; t < keep; ++t)
    seq.indices[t] = vocab.index_of(tokens[t]);
  seq.true_length = static_cast<int>(keep);
  return seq;
}

std::size_t max_corpus_length(
    const std::vector<std::vector<std::string>>& corpus) {
  if (corpus.empty())
    throw ValidationError("max_corpus_length: empty corpus");
  std::size_t best = 0;
  for (const auto& tokens : corpus) best = std::max(best, tokens.size());
  return best;
}

std::vector<std::string> preprocess_text(std::string_view raw, ReduceMode mode,
                                         const VerbLexicon& lexicon,
                                         bool drop_hashtag_body) {
  std::vector<std::string> tokens = tokenize(clean(raw, drop_hashtag_body));
  switch (mode) {
    case ReduceMode::none:
      break;
    case ReduceMode::stem:
      for (auto& t : tokens) t = porter_stem(t);
      break;
    case ReduceMode::lemma:
      for (auto& t : tokens) t = lemmatize_verb(t, lexicon);
      break;
  }
  return tokens;
}

std::vector<std::vector<std::string>> preprocess_corpus(
    const Dataset& ds, ReduceMode mode, const VerbLexicon& lexicon,
    bool drop_hashtag_body) {
  std::vector<std::vector<std::string>> out;
  out.reserve(ds.examples.size());
  for (const auto& ex : ds.examples)
    out.push_back(preprocess_text(ex.raw_text, mode, lexicon, drop_hashtag_body));
  return out;
}

}  // namespace offlang
