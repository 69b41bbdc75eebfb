// offlang: offensive-language tweet classification pipeline CLI.
//
// Subcommands: train, cv, gridsearch, predict, evaluate.
// Exit codes: 0 success, 2 usage/config error, 3 data error, 4 training failure.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "offlang/config.hpp"
#include "offlang/corpus.hpp"
#include "offlang/errors.hpp"
#include "offlang/evaluation.hpp"
#include "offlang/model_io.hpp"
#include "offlang/pipeline.hpp"

namespace {

using namespace offlang;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitTraining = 4;

struct UsageError : Error {
  explicit UsageError(const std::string& msg) : Error(msg) {}
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct CommonOpts {
  std::string task = "a";
  std::string model = "logreg";
  std::string data;
  std::string config_path;
  std::string preprocess = "none";
  std::string verb_exceptions;
  long seed = 0;
  bool augment = false;
  double target_ratio = 1.0;
  bool drop_hashtag_body = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_model = true) {
  cmd->add_option("--task", opts.task, "sub-task: a, b or c");
  if (with_model)
    cmd->add_option("--model", opts.model,
                    "model kind: cnn|lstm|gru|logreg|svm|forest");
  cmd->add_option("--data", opts.data, "OLID-format TSV file")->required();
  cmd->add_option("--config", opts.config_path, "key = value hyperparameter file");
  cmd->add_option("--preprocess", opts.preprocess,
                  "token reduction: none|stem|lemma");
  cmd->add_option("--seed", opts.seed, "random seed");
  cmd->add_flag("--augment", opts.augment,
                "augment the minority class before training");
  cmd->add_option("--target-ratio", opts.target_ratio,
                  "augmentation minority/majority target ratio");
  cmd->add_flag("--drop-hashtag-body", opts.drop_hashtag_body,
                "drop whole #tokens instead of keeping the tag body");
  cmd->add_option("--verb-exceptions", opts.verb_exceptions,
                  "verb-exception table file (default: built-in)");
}

// Everything here is configuration handling: failures are usage errors.
RunConfig build_run_config(const CommonOpts& opts, const KvConfig& hyper) {
  try {
    RunConfig config;
    config.task = task_from_string(opts.task);
    config.model = model_kind_from_string(opts.model);
    config.preprocess_mode = reduce_mode_from_string(opts.preprocess);
    config.drop_hashtag_body = opts.drop_hashtag_body;
    config.seed = static_cast<std::uint64_t>(opts.seed);
    config.hyper = hyper;
    config.augment.enabled = opts.augment;
    config.augment.target_ratio = opts.target_ratio;
    validate_hyper(config.model, config.hyper);
    return config;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

KvConfig load_hyper(const CommonOpts& opts) {
  if (opts.config_path.empty()) return {};
  try {
    return KvConfig::from_file(opts.config_path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

VerbLexicon load_lexicon(const CommonOpts& opts) {
  if (opts.verb_exceptions.empty()) return VerbLexicon::builtin();
  return VerbLexicon::from_file(opts.verb_exceptions);
}

std::string render_cv_report(const CvReport& report, int k, long seed) {
  std::ostringstream out;
  out << "k = " << k << "\n";
  out << "seed = " << seed << "\n";
  for (std::size_t f = 0; f < report.per_fold.size(); ++f) {
    const auto& fold = report.per_fold[f];
    out << "fold." << f << ".macro_f1 = " << fixed6(fold.macro_f1) << "\n";
    out << "fold." << f << ".accuracy = " << fixed6(fold.accuracy) << "\n";
    out << "fold." << f << ".n = " << fold.n << "\n";
  }
  out << "mean.macro_f1 = " << fixed6(report.mean_macro_f1) << "\n";
  out << "mean.accuracy = " << fixed6(report.mean_accuracy) << "\n";
  return out.str();
}

int cmd_train(const CommonOpts& opts, const std::string& out_path) {
  auto config = build_run_config(opts, load_hyper(opts));
  auto lexicon = load_lexicon(opts);
  Dataset ds = load_olid_tsv(opts.data, config.task);
  auto pipeline = train_pipeline(config, lexicon, ds);
  save_model_file(*pipeline, out_path);
  if (pipeline->has_loss)
    std::cout << "final_loss = " << fixed6(pipeline->final_train_loss) << "\n";
  std::cout << "train_accuracy = " << fixed6(pipeline->train_accuracy) << "\n";
  std::cout << "artifact = " << out_path << "\n";
  return 0;
}

int cmd_cv(const CommonOpts& opts, int k, const std::string& report_path) {
  if (k < 2) throw UsageError("--k must be >= 2");
  auto config = build_run_config(opts, load_hyper(opts));
  auto lexicon = load_lexicon(opts);
  Dataset ds = load_olid_tsv(opts.data, config.task);
  auto trainer = make_trainer(config, lexicon);
  CvReport report = cross_validate(*trainer, ds, k, config.seed);
  for (std::size_t f = 0; f < report.per_fold.size(); ++f) {
    const auto& fold = report.per_fold[f];
    std::cout << "fold " << f << ": macro_f1=" << fixed6(fold.macro_f1)
              << " accuracy=" << fixed6(fold.accuracy) << " n=" << fold.n << "\n";
  }
  std::cout << "mean: macro_f1=" << fixed6(report.mean_macro_f1)
            << " accuracy=" << fixed6(report.mean_accuracy) << "\n";
  if (!report_path.empty())
    write_file_atomic(report_path, render_cv_report(report, k, opts.seed));
  return 0;
}

int cmd_gridsearch(const CommonOpts& opts, int k, const std::string& report_path,
                   const std::string& out_path) {
  if (k < 2) throw UsageError("--k must be >= 2");
  KvConfig grid_spec =
      opts.config_path.empty()
          ? default_grid([&] {
              try {
                return model_kind_from_string(opts.model);
              } catch (const Error& e) {
                throw UsageError(e.what());
              }
            }())
          : load_hyper(opts);
  if (grid_spec.empty())
    throw UsageError("gridsearch: the config file defines no grid entries");
  std::vector<KvConfig> grid;
  try {
    grid = expand_grid(grid_spec);
    if (grid.empty()) throw ValidationError("gridsearch: empty grid");
    for (const auto& cell : grid) {
      CommonOpts probe = opts;
      (void)build_run_config(probe, cell);  // validates keys up front
    }
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  auto lexicon = load_lexicon(opts);
  Dataset ds = load_olid_tsv(opts.data, task_from_string(opts.task));

  auto factory = [&](const KvConfig& cell) {
    return make_trainer(build_run_config(opts, cell), lexicon);
  };
  GridResult result =
      grid_search(factory, grid, ds, k, static_cast<std::uint64_t>(opts.seed));

  for (std::size_t i = 0; i < result.all.size(); ++i) {
    const auto& [cell, score] = result.all[i];
    std::cout << "config " << i << ": {" << cell.brief()
              << "} mean_macro_f1=" << fixed6(score) << "\n";
  }
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < result.all.size(); ++i) {
    if (result.all[i].first == result.best_config) {
      best_index = i;
      break;
    }
  }
  std::cout << "best: config " << best_index << " {" << result.best_config.brief()
            << "} mean_macro_f1=" << fixed6(result.best_score) << "\n";

  if (!report_path.empty()) {
    std::ostringstream out;
    out << "n_configs = " << result.all.size() << "\n";
    for (std::size_t i = 0; i < result.all.size(); ++i) {
      out << "config." << i << " = " << result.all[i].first.brief() << "\n";
      out << "config." << i
          << ".mean_macro_f1 = " << fixed6(result.all[i].second) << "\n";
    }
    out << "best.index = " << best_index << "\n";
    out << "best.config = " << result.best_config.brief() << "\n";
    out << "best.mean_macro_f1 = " << fixed6(result.best_score) << "\n";
    write_file_atomic(report_path, out.str());
  }

  if (!out_path.empty()) {
    auto pipeline =
        train_pipeline(build_run_config(opts, result.best_config), lexicon, ds);
    save_model_file(*pipeline, out_path);
    std::cout << "artifact = " << out_path << "\n";
  }
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
  auto pipeline = load_model_file(model_path);
  Dataset ds = load_olid_tsv(data_path, pipeline->config.task);
  auto labels = pipeline->predict(ds);
  std::ostringstream out;
  out << "id,label\n";
  for (std::size_t i = 0; i < ds.size(); ++i)
    out << ds.examples[i].id << "," << labels[i] << "\n";
  write_file_atomic(out_path, out.str());
  std::cout << "predictions = " << out_path << " (" << ds.size() << " rows)\n";
  return 0;
}

std::vector<std::pair<std::string, std::string>> read_label_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id,label")
    throw ParseError(path + ": line 1: expected header 'id,label'");
  std::vector<std::pair<std::string, std::string>> rows;
  std::set<std::string> seen;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError(path + ": line " + std::to_string(lineno) +
                       ": expected id,label");
    std::string id = line.substr(0, comma);
    std::string label = line.substr(comma + 1);
    if (id.empty() || label.empty())
      throw ParseError(path + ": line " + std::to_string(lineno) + ": empty field");
    if (!seen.insert(id).second)
      throw ValidationError(path + ": line " + std::to_string(lineno) +
                            ": duplicate id '" + id + "'");
    rows.emplace_back(std::move(id), std::move(label));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");
  return rows;
}

int cmd_evaluate(const std::string& pred_path, const std::string& gold_path,
                 const std::string& task) {
  auto pred = read_label_csv(pred_path);
  auto gold = read_label_csv(gold_path);
  if (pred.size() != gold.size())
    throw ValidationError("evaluate: id sets differ in size");
  std::map<std::string, std::string> gold_by_id(gold.begin(), gold.end());

  std::vector<std::string> y_true, y_pred;
  y_true.reserve(pred.size());
  y_pred.reserve(pred.size());
  for (const auto& [id, label] : pred) {
    auto it = gold_by_id.find(id);
    if (it == gold_by_id.end())
      throw ValidationError("evaluate: id '" + id + "' has no gold label");
    y_pred.push_back(label);
    y_true.push_back(it->second);
  }

  std::vector<std::string> classes;
  if (!task.empty()) {
    classes = task_classes(task_from_string(task));
  } else {
    std::set<std::string> all(y_true.begin(), y_true.end());
    all.insert(y_pred.begin(), y_pred.end());
    classes.assign(all.begin(), all.end());
  }
  auto report = evaluate_predictions(y_true, y_pred, classes);
  std::cout << "macro_f1 = " << fixed6(report.macro_f1) << "\n";
  std::cout << "accuracy = " << fixed6(report.accuracy) << "\n";
  std::cout << "n = " << report.n << "\n";
  for (const auto& [cls, f1] : report.per_class_f1)
    std::cout << "f1." << cls << " = " << fixed6(f1) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offensive-language tweet classification pipeline"};
  app.require_subcommand(1);

  CommonOpts train_opts, cv_opts, grid_opts;
  std::string train_out, cv_report, grid_report, grid_out;
  int cv_k = 5, grid_k = 5;
  std::string predict_model, predict_data, predict_out;
  std::string eval_pred, eval_gold, eval_task;

  CLI::App* train = app.add_subcommand("train", "train a model on a labeled TSV");
  add_common(train, train_opts);
  train->add_option("--out", train_out, "artifact output path")->required();

  CLI::App* cv = app.add_subcommand("cv", "k-fold cross-validation");
  add_common(cv, cv_opts);
  cv->add_option("--k", cv_k, "number of folds");
  cv->add_option("--report", cv_report, "key = value report output path");

  CLI::App* grid = app.add_subcommand("gridsearch",
                                      "grid search over list-valued config entries");
  add_common(grid, grid_opts);
  grid->add_option("--k", grid_k, "number of folds");
  grid->add_option("--report", grid_report, "key = value report output path");
  grid->add_option("--out", grid_out, "train the best config and save here");

  CLI::App* predict = app.add_subcommand("predict", "label a TSV with a saved model");
  predict->add_option("--model", predict_model, "model artifact")->required();
  predict->add_option("--data", predict_data, "TSV to label")->required();
  predict->add_option("--out", predict_out, "predictions CSV path")->required();

  CLI::App* evaluate = app.add_subcommand("evaluate",
                                          "score a predictions CSV against gold labels");
  evaluate->add_option("--pred", eval_pred, "predictions CSV (id,label)")->required();
  evaluate->add_option("--gold", eval_gold, "gold CSV (id,label)")->required();
  evaluate->add_option("--task", eval_task,
                       "score over the full class list of this task");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train) return cmd_train(train_opts, train_out);
    if (*cv) return cmd_cv(cv_opts, cv_k, cv_report);
    if (*grid) return cmd_gridsearch(grid_opts, grid_k, grid_report, grid_out);
    if (*predict) return cmd_predict(predict_model, predict_data, predict_out);
    if (*evaluate) return cmd_evaluate(eval_pred, eval_gold, eval_task);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
