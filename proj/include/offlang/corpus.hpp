#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace offlang {

// The three hierarchical sub-tasks: offensive or not, targeted or
// untargeted, target type.
enum class Task { A, B, C };

Task task_from_string(const std::string& s);
std::string to_string(Task task);

// Canonical (alphabetical) class order per task. Class index order decides
// argmax tie-breaks everywhere downstream.
const std::vector<std::string>& task_classes(Task task);

struct Example {
  std::string id;
  std::string raw_text;
  std::optional<std::string> label_a;  // NOT | OFF
  std::optional<std::string> label_b;  // TIN | UNT, only when label_a == OFF
  std::optional<std::string> label_c;  // GRP | IND | OTH, only when label_b == TIN

  const std::optional<std::string>& label_for(Task task) const;
};

struct Dataset {
  Task task = Task::A;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  bool labeled() const;

  // Label of example i for this dataset's task; throws if absent.
  const std::string& label_of(std::size_t i) const;
};

// Reads an OLID-format TSV. Five columns
// (id, tweet, subtask_a, subtask_b, subtask_c; NULL for inapplicable labels)
// produce a labeled dataset filtered to rows with a non-NULL label for
// `task`; two columns (id, tweet) produce an unlabeled dataset with every
// row. File order is preserved.
Dataset load_olid_tsv(const std::string& path, Task task);

// Stratified train/validation split; per-class proportions stay within one
// example of the global fraction. Both outputs keep dataset order.
std::pair<Dataset, Dataset> split_holdout(const Dataset& ds,
                                          double train_fraction,
                                          std::uint64_t seed);

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // per-example fold index in [0, k)

  std::vector<std::size_t> fold_members(int fold) const;
};

// Stratified k-fold assignment; fold sizes differ by at most one, per-fold
// class counts deviate from proportional by at most one.
FoldPlan make_folds(const Dataset& ds, int k, std::uint64_t seed);

// Appends synthetic minority-class examples built by sampling a length from
// the empirical minority length distribution and filling it with words drawn
// uniformly from the pooled minority words, until
// minority >= target_ratio * majority. Synthetic ids get an "AUG-" prefix.
// Original examples are untouched and stay as a prefix.
Dataset augment_minority(const Dataset& ds, double target_ratio,
                         std::uint64_t seed);

}  // namespace offlang
