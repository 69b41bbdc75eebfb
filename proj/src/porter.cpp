#include <string>
#include <string_view>

#include "offlang/preprocess.hpp"

// Porter (1980) suffix-stripping, matching the author's reference program
// (the one the published test vocabulary corresponds to): step 2 uses
// bli->ble and logi->log, and words of length <= 2 are left alone.

namespace offlang {

namespace {

class PorterStemmer {
 public:
  explicit PorterStemmer(std::string_view word)
      : b_(word), k_(static_cast<int>(word.size()) - 1) {}

  std::string run() {
    step1ab();
    step1c();
    step2();
    step3();
    step4();
    step5();
    return b_.substr(0, static_cast<std::size_t>(k_) + 1);
  }

 private:
  std::string b_;  // working buffer; [0..k_] is the live word
  int k_ = 0;
  int j_ = 0;  // candidate stem end set by ends(); may be -1

  bool is_consonant(int i) const {
    switch (b_[static_cast<std::size_t>(i)]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !is_consonant(i - 1);
      default:
        return true;
    }
  }

  char at(int i) const { return b_[static_cast<std::size_t>(i)]; }

  // Number of consonant sequences in b[0..j]: [C](VC)^m[V].
  int measure() const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > j_) return n;
      if (!is_consonant(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (is_consonant(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!is_consonant(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (int i = 0; i <= j_; ++i)
      if (!is_consonant(i)) return true;
    return false;
  }

  bool double_consonant(int i) const {
    if (i < 1) return false;
    if (at(i) != at(i - 1)) return false;
    return is_consonant(i);
  }

  // b[i-2..i] is consonant-vowel-consonant and the final consonant is not
  // w, x or y (so e.g. hop -> hope but snow, box, tray stay put).
  bool cvc(int i) const {
    if (i < 2 || !is_consonant(i) || is_consonant(i - 1) ||
        !is_consonant(i - 2))
      return false;
    char c = at(i);
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view suffix) {
    int len = static_cast<int>(suffix.size());
    if (len > k_ + 1) return false;
    if (b_.compare(static_cast<std::size_t>(k_ + 1 - len), suffix.size(),
                   suffix) != 0)
      return false;
    j_ = k_ - len;
    return true;
  }

  void set_to(std::string_view s) {
    std::size_t start = static_cast<std::size_t>(j_ + 1);
    b_.replace(start, b_.size() - start, s);
    k_ = j_ + static_cast<int>(s.size());
  }

  void replace_if_m(std::string_view s) {
    if (measure() > 0) set_to(s);
  }

  // Plurals and -ed / -ing.
  void step1ab() {
    if (at(k_) == 's') {
      if (ends("sses")) {
        k_ -= 2;
      } else if (ends("ies")) {
        set_to("i");
      } else if (at(k_ - 1) != 's') {
        --k_;
      }
    }
    if (ends("eed")) {
      if (measure() > 0) --k_;
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      k_ = j_;
      if (ends("at")) {
        set_to("ate");
      } else if (ends("bl")) {
        set_to("ble");
      } else if (ends("iz")) {
        set_to("ize");
      } else if (double_consonant(k_)) {
        --k_;
        char c = at(k_);
        if (c == 'l' || c == 's' || c == 'z') ++k_;
      } else if (measure() == 1 && cvc(k_)) {
        set_to("e");
      }
    }
  }

  // Terminal y -> i when the stem has a vowel.
  void step1c() {
    if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
  }

  struct Rule {
    std::string_view suffix, replacement;
  };

  // First matching suffix wins; replacement only when m(stem) > 0.
  void apply_first(const Rule* rules, std::size_t count) {
    for (std::size_t r = 0; r < count; ++r) {
      if (ends(rules[r].suffix)) {
        replace_if_m(rules[r].replacement);
        return;
      }
    }
  }

  // Double suffixes to single ones (-ization -> -ize etc).
  void step2() {
    if (k_ < 1) return;
    static constexpr Rule rules[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
        {"anci", "ance"},   {"izer", "ize"},    {"bli", "ble"},
        {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
        {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
        {"iviti", "ive"},   {"biliti", "ble"},  {"logi", "log"},
    };
    // dispatch on the penultimate character, as the reference program does
    switch (at(k_ - 1)) {
      case 'a': apply_first(rules + 0, 2); break;
      case 'c': apply_first(rules + 2, 2); break;
      case 'e': apply_first(rules + 4, 1); break;
      case 'l': apply_first(rules + 5, 5); break;
      case 'o': apply_first(rules + 10, 3); break;
      case 's': apply_first(rules + 13, 4); break;
      case 't': apply_first(rules + 17, 3); break;
      case 'g': apply_first(rules + 20, 1); break;
      default: break;
    }
  }

  void step3() {
    static constexpr Rule rules[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"},
        {"iciti", "ic"}, {"ical", "ic"}, {"ful", ""}, {"ness", ""},
    };
    switch (at(k_)) {
      case 'e': apply_first(rules + 0, 3); break;
      case 'i': apply_first(rules + 3, 1); break;
      case 'l': apply_first(rules + 4, 2); break;
      case 's': apply_first(rules + 6, 1); break;
      default: break;
    }
  }

  // Bare suffix removal in context m(stem) > 1.
  void step4() {
    if (k_ < 1) return;
    bool matched = false;
    switch (at(k_ - 1)) {
      case 'a': matched = ends("al"); break;
      case 'c': matched = ends("ance") || ends("ence"); break;
      case 'e': matched = ends("er"); break;
      case 'i': matched = ends("ic"); break;
      case 'l': matched = ends("able") || ends("ible"); break;
      case 'n':
        matched = ends("ant") || ends("ement") || ends("ment") || ends("ent");
        break;
      case 'o':
        // -ion only after s/t (adoption, decision); -ou covers -ous stems
        matched = (ends("ion") && j_ >= 0 && (at(j_) == 's' || at(j_) == 't')) ||
                  ends("ou");
        break;
      case 's': matched = ends("ism"); break;
      case 't': matched = ends("ate") || ends("iti"); break;
      case 'u': matched = ends("ous"); break;
      case 'v': matched = ends("ive"); break;
      case 'z': matched = ends("ize"); break;
      default: break;
    }
    if (matched && measure() > 1) k_ = j_;
  }

  // Tidy up a final -e and -ll.
  void step5() {
    j_ = k_;
    if (at(k_) == 'e') {
      int a = measure();
      if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
    }
    if (at(k_) == 'l' && double_consonant(k_) && measure() > 1) --k_;
  }
};

}  // namespace

std::string porter_stem(std::string_view word) {
  if (word.size() <= 2) return std::string(word);
  return PorterStemmer(word).run();
}

}  // namespace offlang
