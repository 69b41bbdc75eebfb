#include "offlang/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "offlang/errors.hpp"

namespace offlang {

namespace {

double entropy(const std::vector<long>& counts, long total) {
  if (total <= 0) return 0.0;
  double h = 0.0;
  for (long c : counts) {
    if (c <= 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h;
}

struct Builder {
  const std::vector<SparseVector>& X;
  const std::vector<int>& y;
  int n_classes;
  std::size_t n_features;
  const TreeParams& params;
  Rng& rng;
  DecisionTree tree;

  int build(std::vector<std::size_t>& samples, int depth) {
    std::vector<long> counts(static_cast<std::size_t>(n_classes), 0);
    for (std::size_t i : samples) ++counts[static_cast<std::size_t>(y[i])];
    const long total = static_cast<long>(samples.size());

    bool pure = false;
    for (long c : counts) pure |= (c == total);
    bool depth_stop = params.max_depth >= 0 && depth >= params.max_depth;
    bool size_stop =
        total < static_cast<long>(std::max(2, params.min_samples_split));

    int best_feature = -1;
    double best_threshold = 0.0, best_gain = -1.0;
    if (!pure && !depth_stop && !size_stop) {
      find_best_split(samples, counts, best_feature, best_threshold, best_gain);
    }

    int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (best_feature < 0) {
      tree.nodes[static_cast<std::size_t>(node_index)].counts = std::move(counts);
      return node_index;
    }

    std::vector<std::size_t> left, right;
    for (std::size_t i : samples) {
      (X[i].at(best_feature) <= best_threshold ? left : right).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();

    int l = build(left, depth + 1);
    int r = build(right, depth + 1);
    DecisionTree::Node& node = tree.nodes[static_cast<std::size_t>(node_index)];
    node.is_leaf = false;
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return node_index;
  }

  // Candidate features: all, or a random subset of features_per_split
  // distinct columns. Within the candidates, ties on gain go to the lowest
  // (feature, threshold).
  std::vector<std::size_t> candidate_features() {
    std::size_t want = params.features_per_split > 0
                           ? std::min<std::size_t>(
                                 static_cast<std::size_t>(params.features_per_split),
                                 n_features)
                           : n_features;
    std::vector<std::size_t> all(n_features);
    std::iota(all.begin(), all.end(), 0);
    if (want == n_features) return all;
    // partial Fisher-Yates, then sort for the deterministic tie-break order
    for (std::size_t i = 0; i < want; ++i) {
      std::size_t j = i + rng.uniform_index(n_features - i);
      std::swap(all[i], all[j]);
    }
    all.resize(want);
    std::sort(all.begin(), all.end());
    return all;
  }

  void find_best_split(const std::vector<std::size_t>& samples,
                       const std::vector<long>& parent_counts, int& best_feature,
                       double& best_threshold, double& best_gain) {
    const long total = static_cast<long>(samples.size());
    const double parent_h = entropy(parent_counts, total);
    std::vector<std::pair<double, int>> values;  // (feature value, label)
    for (std::size_t f : candidate_features()) {
      values.clear();
      values.reserve(samples.size());
      for (std::size_t i : samples)
        values.emplace_back(X[i].at(static_cast<int>(f)), y[i]);
      std::sort(values.begin(), values.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (values.front().first == values.back().first) continue;

      std::vector<long> left(static_cast<std::size_t>(n_classes), 0);
      long n_left = 0;
      for (std::size_t v = 0; v + 1 < values.size(); ++v) {
        ++left[static_cast<std::size_t>(values[v].second)];
        ++n_left;
        if (values[v].first == values[v + 1].first) continue;
        double threshold = values[v].first +
                           0.5 * (values[v + 1].first - values[v].first);
        double h_left = entropy(left, n_left);
        std::vector<long> right(parent_counts);
        for (std::size_t c = 0; c < right.size(); ++c) right[c] -= left[c];
        double h_right = entropy(right, total - n_left);
        double gain = parent_h -
                      (static_cast<double>(n_left) / static_cast<double>(total)) * h_left -
                      (static_cast<double>(total - n_left) / static_cast<double>(total)) * h_right;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = threshold;
        }
      }
    }
  }
};

}  // namespace

double information_gain(const std::vector<long>& parent_counts,
                        const std::vector<long>& left_counts,
                        const std::vector<long>& right_counts) {
  long total = 0, nl = 0, nr = 0;
  for (long c : parent_counts) total += c;
  for (long c : left_counts) nl += c;
  for (long c : right_counts) nr += c;
  if (total == 0) return 0.0;
  return entropy(parent_counts, total) -
         (static_cast<double>(nl) / static_cast<double>(total)) * entropy(left_counts, nl) -
         (static_cast<double>(nr) / static_cast<double>(total)) * entropy(right_counts, nr);
}

DecisionTree train_tree(const std::vector<SparseVector>& X,
                        const std::vector<int>& y, int n_classes,
                        std::size_t n_features, const TreeParams& params,
                        Rng& rng) {
  if (X.empty() || X.size() != y.size())
    throw ValidationError("train_tree: need |X| = |y| >= 1");
  Builder b{X, y, n_classes, n_features, params, rng, {}};
  std::vector<std::size_t> samples(X.size());
  std::iota(samples.begin(), samples.end(), 0);
  b.build(samples, 0);
  return std::move(b.tree);
}

int predict_tree(const DecisionTree& tree, const SparseVector& x) {
  const DecisionTree::Node* node = &tree.nodes[0];
  while (!node->is_leaf) {
    int next = x.at(node->feature) <= node->threshold ? node->left : node->right;
    node = &tree.nodes[static_cast<std::size_t>(next)];
  }
  return static_cast<int>(
      std::max_element(node->counts.begin(), node->counts.end()) -
      node->counts.begin());
}

ForestModel train_forest(const std::vector<SparseVector>& X,
                         const std::vector<int>& y, int n_classes,
                         std::size_t n_features, const ForestParams& params,
                         std::uint64_t seed) {
  if (params.n_trees < 1)
    throw ValidationError("train_forest: n_trees must be >= 1");
  if (X.empty() || X.size() != y.size())
    throw ValidationError("train_forest: need |X| = |y| >= 1");

  ForestModel model;
  model.n_classes = n_classes;
  model.n_features = n_features;
  model.params = params;
  model.seed = seed;

  TreeParams tree_params;
  tree_params.max_depth = params.max_depth;
  tree_params.min_samples_split = params.min_samples_split;
  tree_params.features_per_split =
      params.features_per_split > 0
          ? params.features_per_split
          : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_features))));

  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
    std::vector<SparseVector> bx;
    std::vector<int> by;
    if (params.bootstrap) {
      bx.reserve(X.size());
      by.reserve(X.size());
      for (std::size_t i = 0; i < X.size(); ++i) {
        std::size_t pick = rng.uniform_index(X.size());
        bx.push_back(X[pick]);
        by.push_back(y[pick]);
      }
      model.trees.push_back(
          train_tree(bx, by, n_classes, n_features, tree_params, rng));
    } else {
      model.trees.push_back(
          train_tree(X, y, n_classes, n_features, tree_params, rng));
    }
  }
  return model;
}

std::vector<int> predict_forest(const ForestModel& model,
                                const std::vector<SparseVector>& X) {
  std::vector<int> out;
  out.reserve(X.size());
  std::vector<long> votes(static_cast<std::size_t>(model.n_classes));
  for (const auto& x : X) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& tree : model.trees)
      ++votes[static_cast<std::size_t>(predict_tree(tree, x))];
    out.push_back(static_cast<int>(
        std::max_element(votes.begin(), votes.end()) - votes.begin()));
  }
  return out;
}

}  // namespace offlang
