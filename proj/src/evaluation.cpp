#include "offlang/evaluation.hpp"

#include <algorithm>

#include "offlang/errors.hpp"

namespace offlang {

ConfusionCounts confusion(const std::vector<std::string>& y_true,
                          const std::vector<std::string>& y_pred,
                          const std::vector<std::string>& classes) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    throw ValidationError("confusion: need equal-length non-empty label lists");

  auto index_of = [&](const std::string& label) {
    auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end())
      throw ValidationError("confusion: label '" + label +
                            "' not in the class list");
    return static_cast<std::size_t>(it - classes.begin());
  };

  ConfusionCounts out;
  out.classes = classes;
  out.tp.assign(classes.size(), 0);
  out.fp.assign(classes.size(), 0);
  out.fn.assign(classes.size(), 0);
  out.tn.assign(classes.size(), 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    std::size_t t = index_of(y_true[i]);
    std::size_t p = index_of(y_pred[i]);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      if (c == t && c == p) ++out.tp[c];
      else if (c == p) ++out.fp[c];
      else if (c == t) ++out.fn[c];
      else ++out.tn[c];
    }
  }
  return out;
}

namespace {

double f1_of(long tp, long fp, long fn) {
  double precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  double recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  return (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall)
                                    : 0.0;
}

}  // namespace

double macro_f1(const ConfusionCounts& counts) {
  double sum = 0.0;
  for (std::size_t c = 0; c < counts.classes.size(); ++c)
    sum += f1_of(counts.tp[c], counts.fp[c], counts.fn[c]);
  return sum / static_cast<double>(counts.classes.size());
}

std::map<std::string, double> per_class_f1(const ConfusionCounts& counts) {
  std::map<std::string, double> out;
  for (std::size_t c = 0; c < counts.classes.size(); ++c)
    out[counts.classes[c]] = f1_of(counts.tp[c], counts.fp[c], counts.fn[c]);
  return out;
}

double accuracy(const std::vector<std::string>& y_true,
                const std::vector<std::string>& y_pred) {
  if (y_true.empty()) throw ValidationError("accuracy: empty input");
  if (y_true.size() != y_pred.size())
    throw ValidationError("accuracy: length mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += (y_true[i] == y_pred[i]);
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

EvalReport evaluate_predictions(const std::vector<std::string>& y_true,
                                const std::vector<std::string>& y_pred,
                                const std::vector<std::string>& classes) {
  auto counts = confusion(y_true, y_pred, classes);
  EvalReport report;
  report.macro_f1 = macro_f1(counts);
  report.accuracy = accuracy(y_true, y_pred);
  report.per_class_f1 = per_class_f1(counts);
  report.n = y_true.size();
  return report;
}

CvReport cross_validate(const Trainer& trainer, const Dataset& ds, int k,
                        std::uint64_t seed) {
  FoldPlan plan = make_folds(ds, k, seed);
  const auto& classes = task_classes(ds.task);

  CvReport report;
  for (int fold = 0; fold < k; ++fold) {
    Dataset train, valid;
    train.task = valid.task = ds.task;
    for (std::size_t i = 0; i < ds.size(); ++i)
      (plan.assignments[i] == fold ? valid : train).examples.push_back(ds.examples[i]);

    try {
      auto predictor = trainer.fit(train);
      auto y_pred = predictor->predict(valid);
      std::vector<std::string> y_true;
      y_true.reserve(valid.size());
      for (std::size_t i = 0; i < valid.size(); ++i) y_true.push_back(valid.label_of(i));
      report.per_fold.push_back(evaluate_predictions(y_true, y_pred, classes));
    } catch (const Error& e) {
      throw TrainingError("cross_validate: fold " + std::to_string(fold) + ": " +
                          e.what());
    }
  }
  for (const auto& fold : report.per_fold) {
    report.mean_macro_f1 += fold.macro_f1;
    report.mean_accuracy += fold.accuracy;
  }
  report.mean_macro_f1 /= static_cast<double>(k);
  report.mean_accuracy /= static_cast<double>(k);
  return report;
}

GridResult grid_search(
    const std::function<std::unique_ptr<Trainer>(const KvConfig&)>& factory,
    const std::vector<KvConfig>& grid, const Dataset& ds, int k,
    std::uint64_t seed) {
  if (grid.empty()) throw ValidationError("grid_search: empty grid");

  GridResult result;
  bool have_best = false;
  for (const auto& config : grid) {
    CvReport report;
    try {
      auto trainer = factory(config);
      report = cross_validate(*trainer, ds, k, seed);
    } catch (const Error& e) {
      throw TrainingError("grid_search: config {" + config.brief() + "}: " +
                          e.what());
    }
    result.all.emplace_back(config, report.mean_macro_f1);
    if (!have_best || report.mean_macro_f1 > result.best_score) {
      have_best = true;
      result.best_score = report.mean_macro_f1;
      result.best_config = config;
    }
  }
  return result;
}

}  // namespace offlang
