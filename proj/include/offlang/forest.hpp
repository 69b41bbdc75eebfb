#pragma once

#include <cstdint>
#include <vector>

#include "offlang/features.hpp"
#include "offlang/rng.hpp"

namespace offlang {

// Binary-split decision tree with information-gain (entropy, natural log)
// split selection. Thresholds are midpoints between consecutive distinct
// feature values of the node's samples; absent sparse entries count as 0.
struct DecisionTree {
  struct Node {
    bool is_leaf = true;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;   // x[feature] <= threshold
    int right = -1;  // x[feature] >  threshold
    std::vector<long> counts;  // leaf class counts

    bool operator==(const Node&) const = default;
  };

  std::vector<Node> nodes;  // nodes[0] is the root

  bool operator==(const DecisionTree&) const = default;
};

struct TreeParams {
  int max_depth = -1;          // -1 = unlimited
  int min_samples_split = 2;
  int features_per_split = -1; // -1 = all features
};

DecisionTree train_tree(const std::vector<SparseVector>& X,
                        const std::vector<int>& y, int n_classes,
                        std::size_t n_features, const TreeParams& params,
                        Rng& rng);

// Leaf majority, ties to the lowest class index.
int predict_tree(const DecisionTree& tree, const SparseVector& x);

struct ForestParams {
  int n_trees = 100;
  int max_depth = -1;
  int min_samples_split = 2;
  int features_per_split = 0;  // 0 = ceil(sqrt(n_features))
  bool bootstrap = true;       // debug flag; off makes each tree see all rows

  bool operator==(const ForestParams&) const = default;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int n_classes = 0;
  std::size_t n_features = 0;
  ForestParams params;
  std::uint64_t seed = 0;

  bool operator==(const ForestModel&) const = default;
};

// Each tree trains on its own bootstrap sample with an independent stream
// derived from (seed, tree index).
ForestModel train_forest(const std::vector<SparseVector>& X,
                         const std::vector<int>& y, int n_classes,
                         std::size_t n_features, const ForestParams& params,
                         std::uint64_t seed);

// Majority vote over trees, ties to the lowest class index.
std::vector<int> predict_forest(const ForestModel& model,
                                const std::vector<SparseVector>& X);

// Entropy reduction of a candidate split; >= 0, and 0 for a no-op split.
double information_gain(const std::vector<long>& parent_counts,
                        const std::vector<long>& left_counts,
                        const std::vector<long>& right_counts);

}  // namespace offlang
