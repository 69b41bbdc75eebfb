#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "offlang/config.hpp"
#include "offlang/corpus.hpp"
#include "offlang/evaluation.hpp"
#include "offlang/features.hpp"
#include "offlang/forest.hpp"
#include "offlang/linear.hpp"
#include "offlang/neural.hpp"
#include "offlang/preprocess.hpp"

namespace offlang {

enum class ModelKind { cnn, lstm, gru, logreg, svm, forest };

ModelKind model_kind_from_string(const std::string& s);
std::string to_string(ModelKind kind);
bool is_neural(ModelKind kind);

struct AugmentConfig {
  bool enabled = false;
  double target_ratio = 1.0;
};

// Everything needed to reproduce one training run.
struct RunConfig {
  Task task = Task::A;
  ModelKind model = ModelKind::logreg;
  ReduceMode preprocess_mode = ReduceMode::none;
  bool drop_hashtag_body = false;
  std::uint64_t seed = 0;
  KvConfig hyper;  // validated against the model's known keys
  AugmentConfig augment;
};

// Known hyperparameter keys for a model kind; unknown keys are errors.
const std::vector<std::string>& known_hyper_keys(ModelKind kind);
void validate_hyper(ModelKind kind, const KvConfig& hyper);

// Paper-gap default grid per model kind.
KvConfig default_grid(ModelKind kind);

// A fully fitted pipeline: preprocessing context, fitted feature space and
// trained parameters. This is what artifacts persist.
struct TrainedPipeline : Predictor {
  RunConfig config;
  std::vector<std::string> classes;
  VerbLexicon lexicon;

  // classical route
  std::optional<TfidfModel> tfidf;
  // neural route
  std::optional<Vocabulary> vocab;
  std::size_t max_len = 0;

  std::variant<LinearModel, ForestModel, NeuralModel> model;

  std::vector<std::string> predict(const Dataset& ds) const override;
  std::vector<std::string> predict_texts(
      const std::vector<std::string>& texts) const;

  // Training-set diagnostics captured at fit time.
  double final_train_loss = 0.0;
  bool has_loss = false;
  double train_accuracy = 0.0;
};

// Builds the self-contained trainer for a run configuration. The trainer
// applies augmentation (when enabled) and fits preprocessing, features and
// the model on exactly the data passed to fit().
std::unique_ptr<Trainer> make_trainer(const RunConfig& config,
                                      const VerbLexicon& lexicon);

std::unique_ptr<TrainedPipeline> train_pipeline(const RunConfig& config,
                                                const VerbLexicon& lexicon,
                                                const Dataset& train);

}  // namespace offlang
