#include "offlang/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "offlang/errors.hpp"
#include "offlang/preprocess.hpp"
#include "offlang/rng.hpp"

namespace offlang {

Task task_from_string(const std::string& s) {
  if (s == "a" || s == "A") return Task::A;
  if (s == "b" || s == "B") return Task::B;
  if (s == "c" || s == "C") return Task::C;
  throw ValidationError("unknown task: '" + s + "' (expected a|b|c)");
}

std::string to_string(Task task) {
  switch (task) {
    case Task::A: return "a";
    case Task::B: return "b";
    case Task::C: return "c";
  }
  return "a";
}

const std::vector<std::string>& task_classes(Task task) {
  static const std::vector<std::string> a = {"NOT", "OFF"};
  static const std::vector<std::string> b = {"TIN", "UNT"};
  static const std::vector<std::string> c = {"GRP", "IND", "OTH"};
  switch (task) {
    case Task::A: return a;
    case Task::B: return b;
    case Task::C: return c;
  }
  return a;
}

const std::optional<std::string>& Example::label_for(Task task) const {
  switch (task) {
    case Task::A: return label_a;
    case Task::B: return label_b;
    case Task::C: return label_c;
  }
  return label_a;
}

bool Dataset::labeled() const {
  if (examples.empty()) return false;
  for (const auto& ex : examples)
    if (!ex.label_for(task).has_value()) return false;
  return true;
}

const std::string& Dataset::label_of(std::size_t i) const {
  const auto& label = examples[i].label_for(task);
  if (!label)
    throw ValidationError("example '" + examples[i].id + "' has no label for task " +
                          to_string(task));
  return *label;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<std::string> parse_label(const std::string& raw,
                                       const std::vector<std::string>& allowed,
                                       const std::string& column,
                                       std::size_t lineno) {
  if (raw == "NULL") return std::nullopt;
  if (std::find(allowed.begin(), allowed.end(), raw) == allowed.end())
    throw ValidationError("line " + std::to_string(lineno) + ": unknown " +
                          column + " label '" + raw + "'");
  return raw;
}

// Class label -> indices of its members, in canonical class order. Every
// class with zero members still gets a (possibly empty) bucket.
std::vector<std::vector<std::size_t>> group_by_class(const Dataset& ds) {
  const auto& classes = task_classes(ds.task);
  std::vector<std::vector<std::size_t>> groups(classes.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::string& label = ds.label_of(i);
    auto it = std::find(classes.begin(), classes.end(), label);
    groups[static_cast<std::size_t>(it - classes.begin())].push_back(i);
  }
  return groups;
}

}  // namespace

Dataset load_olid_tsv(const std::string& path, Task task) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  // tolerate a UTF-8 BOM on the header
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

  auto header = split_tabs(line);
  bool labeled;
  if (header == std::vector<std::string>{"id", "tweet", "subtask_a", "subtask_b",
                                         "subtask_c"}) {
    labeled = true;
  } else if (header == std::vector<std::string>{"id", "tweet"}) {
    labeled = false;
  } else {
    throw ParseError(path + ": line 1: unrecognized header");
  }
  const std::size_t want_cols = labeled ? 5 : 2;

  Dataset ds;
  ds.task = task;
  std::unordered_set<std::string> seen_ids;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != want_cols)
      throw ParseError(path + ": line " + std::to_string(lineno) + ": expected " +
                       std::to_string(want_cols) + " columns, got " +
                       std::to_string(fields.size()));

    Example ex;
    ex.id = fields[0];
    ex.raw_text = fields[1];
    if (ex.id.empty())
      throw ValidationError(path + ": line " + std::to_string(lineno) +
                            ": empty id");
    if (!seen_ids.insert(ex.id).second)
      throw ValidationError(path + ": line " + std::to_string(lineno) +
                            ": duplicate id '" + ex.id + "'");

    if (labeled) {
      ex.label_a = parse_label(fields[2], task_classes(Task::A), "subtask_a", lineno);
      ex.label_b = parse_label(fields[3], task_classes(Task::B), "subtask_b", lineno);
      ex.label_c = parse_label(fields[4], task_classes(Task::C), "subtask_c", lineno);
      if (ex.label_b && ex.label_a != "OFF")
        throw ValidationError(path + ": line " + std::to_string(lineno) +
                              ": subtask_b label without subtask_a = OFF");
      if (ex.label_c && ex.label_b != "TIN")
        throw ValidationError(path + ": line " + std::to_string(lineno) +
                              ": subtask_c label without subtask_b = TIN");
      if (!ex.label_for(task).has_value()) continue;  // not annotated for this task
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

std::pair<Dataset, Dataset> split_holdout(const Dataset& ds,
                                          double train_fraction,
                                          std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ValidationError("split_holdout: train_fraction must be in (0,1)");
  if (!ds.labeled())
    throw ValidationError("split_holdout: dataset must be labeled");

  auto groups = group_by_class(ds);
  Rng rng(seed);
  std::vector<bool> in_train(ds.size(), false);
  const auto& classes = task_classes(ds.task);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& members = groups[g];
    if (members.empty()) continue;
    if (members.size() < 2)
      throw ValidationError("split_holdout: class '" + classes[g] +
                            "' has fewer than 2 examples");
    rng.shuffle(members);
    // round half up, then clamp so both sides keep at least one member
    auto take = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(members.size()) + 0.5));
    take = std::max<std::size_t>(1, std::min(take, members.size() - 1));
    for (std::size_t i = 0; i < take; ++i) in_train[members[i]] = true;
  }

  Dataset train, valid;
  train.task = valid.task = ds.task;
  for (std::size_t i = 0; i < ds.size(); ++i)
    (in_train[i] ? train : valid).examples.push_back(ds.examples[i]);
  return {std::move(train), std::move(valid)};
}

std::vector<std::size_t> FoldPlan::fold_members(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) out.push_back(i);
  return out;
}

FoldPlan make_folds(const Dataset& ds, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("make_folds: k must be >= 2");
  if (static_cast<std::size_t>(k) > ds.size())
    throw ValidationError("make_folds: k exceeds dataset size");
  if (!ds.labeled())
    throw ValidationError("make_folds: dataset must be labeled");

  auto groups = group_by_class(ds);
  Rng rng(seed);
  FoldPlan plan;
  plan.k = k;
  plan.assignments.assign(ds.size(), 0);
  // Deal shuffled class members into folds with a counter that runs across
  // classes: overall fold sizes and per-class fold counts both stay within 1.
  std::size_t counter = 0;
  for (auto& members : groups) {
    rng.shuffle(members);
    for (std::size_t idx : members) {
      plan.assignments[idx] = static_cast<int>(counter % static_cast<std::size_t>(k));
      ++counter;
    }
  }
  return plan;
}

Dataset augment_minority(const Dataset& ds, double target_ratio,
                         std::uint64_t seed) {
  if (!(target_ratio > 0.0 && target_ratio <= 1.0))
    throw ValidationError("augment_minority: target_ratio must be in (0,1]");
  if (!ds.labeled())
    throw ValidationError("augment_minority: dataset must be labeled");

  const auto& classes = task_classes(ds.task);
  auto groups = group_by_class(ds);
  std::size_t min_count = ds.size() + 1, max_count = 0;
  std::size_t minority = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < min_count) {
      min_count = groups[g].size();
      minority = g;
    }
    max_count = std::max(max_count, groups[g].size());
  }
  std::size_t ties = 0;
  for (const auto& g : groups) ties += (g.size() == min_count);
  if (ties != 1)
    throw ValidationError("augment_minority: no unique minority class");
  if (min_count == 0)
    throw ValidationError("augment_minority: minority class '" +
                          classes[minority] + "' is empty");

  // Empirical length distribution and pooled words of the minority class,
  // both over whitespace tokens of the raw text.
  std::vector<std::size_t> lengths;
  std::vector<std::string> pool;
  for (std::size_t idx : groups[minority]) {
    auto words = tokenize(ds.examples[idx].raw_text);
    lengths.push_back(words.size());
    for (auto& w : words) pool.push_back(std::move(w));
  }

  double target = target_ratio * static_cast<double>(max_count);
  std::size_t want = static_cast<std::size_t>(std::ceil(target - 1e-9));
  std::size_t n_new = want > min_count ? want - min_count : 0;
  if (n_new > 0 && pool.empty())
    throw ValidationError("augment_minority: minority class has no words to sample");

  Dataset out = ds;
  Rng rng(seed);
  const std::string& label = classes[minority];
  for (std::size_t i = 0; i < n_new; ++i) {
    std::size_t len = lengths[rng.uniform_index(lengths.size())];
    std::string text;
    for (std::size_t w = 0; w < len; ++w) {
      if (w) text.push_back(' ');
      text += pool[rng.uniform_index(pool.size())];
    }
    Example ex;
    ex.id = "AUG-" + std::to_string(i + 1);
    ex.raw_text = std::move(text);
    switch (ds.task) {
      case Task::A:
        ex.label_a = label;
        break;
      case Task::B:
        ex.label_a = "OFF";
        ex.label_b = label;
        break;
      case Task::C:
        ex.label_a = "OFF";
        ex.label_b = "TIN";
        ex.label_c = label;
        break;
    }
    out.examples.push_back(std::move(ex));
  }
  return out;
}

}  // namespace offlang
