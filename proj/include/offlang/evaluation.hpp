#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "offlang/config.hpp"
#include "offlang/corpus.hpp"

namespace offlang {

// One-vs-rest counts per class, over a fixed class list.
struct ConfusionCounts {
  std::vector<std::string> classes;
  std::vector<long> tp, fp, fn, tn;
};

ConfusionCounts confusion(const std::vector<std::string>& y_true,
                          const std::vector<std::string>& y_pred,
                          const std::vector<std::string>& classes);

// Unweighted mean of per-class F1 over the full class list; 0/0 ratios are 0.
double macro_f1(const ConfusionCounts& counts);

std::map<std::string, double> per_class_f1(const ConfusionCounts& counts);

double accuracy(const std::vector<std::string>& y_true,
                const std::vector<std::string>& y_pred);

struct EvalReport {
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::map<std::string, double> per_class_f1;
  std::size_t n = 0;
};

EvalReport evaluate_predictions(const std::vector<std::string>& y_true,
                                const std::vector<std::string>& y_pred,
                                const std::vector<std::string>& classes);

struct CvReport {
  std::vector<EvalReport> per_fold;
  double mean_macro_f1 = 0.0;
  double mean_accuracy = 0.0;
};

// A fitted pipeline ready to label raw examples.
struct Predictor {
  virtual ~Predictor() = default;
  virtual std::vector<std::string> predict(const Dataset& ds) const = 0;
};

// Self-contained training procedure: preprocessing, feature fitting and any
// augmentation all happen inside fit(), so nothing can leak from validation
// folds.
struct Trainer {
  virtual ~Trainer() = default;
  virtual std::unique_ptr<Predictor> fit(const Dataset& train) const = 0;
};

// Stratified k-fold cross-validation: fit on k-1 folds, evaluate on the
// held-out fold, fresh parameters per iteration, arithmetic mean over folds.
CvReport cross_validate(const Trainer& trainer, const Dataset& ds, int k,
                        std::uint64_t seed);

struct GridResult {
  KvConfig best_config;
  double best_score = 0.0;
  std::vector<std::pair<KvConfig, double>> all;  // grid order
};

// Evaluates every config with cross_validate on identical partitions (same
// seed); best = max mean macro-F1, ties to the earliest grid position.
GridResult grid_search(
    const std::function<std::unique_ptr<Trainer>(const KvConfig&)>& factory,
    const std::vector<KvConfig>& grid, const Dataset& ds, int k,
    std::uint64_t seed);

}  // namespace offlang
