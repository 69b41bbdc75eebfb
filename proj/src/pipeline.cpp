#include "offlang/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "offlang/errors.hpp"

namespace offlang {

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "cnn") return ModelKind::cnn;
  if (s == "lstm") return ModelKind::lstm;
  if (s == "gru") return ModelKind::gru;
  if (s == "logreg") return ModelKind::logreg;
  if (s == "svm") return ModelKind::svm;
  if (s == "forest") return ModelKind::forest;
  throw ValidationError("unknown model kind: '" + s +
                        "' (expected cnn|lstm|gru|logreg|svm|forest)");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::cnn: return "cnn";
    case ModelKind::lstm: return "lstm";
    case ModelKind::gru: return "gru";
    case ModelKind::logreg: return "logreg";
    case ModelKind::svm: return "svm";
    case ModelKind::forest: return "forest";
  }
  return "logreg";
}

bool is_neural(ModelKind kind) {
  return kind == ModelKind::cnn || kind == ModelKind::lstm ||
         kind == ModelKind::gru;
}

const std::vector<std::string>& known_hyper_keys(ModelKind kind) {
  static const std::vector<std::string> cnn = {
      "learning_rate", "epochs",      "batch_size", "dropout",
      "n_filters",     "kernel_sizes", "embed_dim",  "clip_norm"};
  static const std::vector<std::string> rnn = {
      "learning_rate", "epochs",      "batch_size", "embed_dim",
      "hidden",        "head_hidden", "clip_norm"};
  static const std::vector<std::string> logreg = {"l2", "learning_rate",
                                                  "epochs", "batch_size"};
  static const std::vector<std::string> svm = {"c", "learning_rate", "epochs"};
  static const std::vector<std::string> forest = {
      "n_trees", "max_depth", "features_per_split", "min_samples_split",
      "bootstrap"};
  switch (kind) {
    case ModelKind::cnn: return cnn;
    case ModelKind::lstm:
    case ModelKind::gru: return rnn;
    case ModelKind::logreg: return logreg;
    case ModelKind::svm: return svm;
    case ModelKind::forest: return forest;
  }
  return logreg;
}

namespace {

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& item : split_list(value)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ValidationError("config key '" + key +
                            "': expected integers, got '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError("config key '" + key + "': empty list");
  return out;
}

}  // namespace

void validate_hyper(ModelKind kind, const KvConfig& hyper) {
  const auto& known = known_hyper_keys(kind);
  for (const auto& [key, value] : hyper.entries()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("unknown hyperparameter '" + key + "' for model " +
                            to_string(kind));
  }
  // typed keys must parse; surfaces value errors before any work happens
  for (const char* key : {"l2", "c", "learning_rate", "dropout", "clip_norm"})
    if (hyper.has(key)) hyper.get_double(key, 0.0);
  for (const char* key : {"epochs", "batch_size", "n_filters", "embed_dim",
                          "hidden", "head_hidden", "n_trees",
                          "features_per_split", "min_samples_split"})
    if (hyper.has(key)) hyper.get_long(key, 0);
  if (hyper.has("bootstrap")) hyper.get_bool("bootstrap", true);
  if (auto ks = hyper.get("kernel_sizes")) parse_int_list("kernel_sizes", *ks);
  if (auto depth = hyper.get("max_depth")) {
    if (*depth != "none") {
      KvConfig probe;
      probe.set("max_depth", *depth);
      probe.get_long("max_depth", 0);
    }
  }
}

KvConfig default_grid(ModelKind kind) {
  KvConfig grid;
  switch (kind) {
    case ModelKind::cnn:
      grid.set("learning_rate", "0.01,0.05");
      grid.set("dropout", "0.3,0.5");
      grid.set("n_filters", "32,64");
      break;
    case ModelKind::lstm:
    case ModelKind::gru:
      grid.set("learning_rate", "0.01,0.05");
      grid.set("epochs", "10,20");
      break;
    case ModelKind::logreg:
      grid.set("l2", "0.0001,0.01");
      break;
    case ModelKind::svm:
      grid.set("c", "0.1,1,10");
      break;
    case ModelKind::forest:
      grid.set("n_trees", "50,100");
      grid.set("max_depth", "10,none");
      break;
  }
  return grid;
}

namespace {

int class_index(const std::vector<std::string>& classes, const std::string& label) {
  auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end())
    throw ValidationError("label '" + label + "' not in the task class list");
  return static_cast<int>(it - classes.begin());
}

std::vector<int> encode_labels(const Dataset& ds,
                               const std::vector<std::string>& classes) {
  std::vector<int> y;
  y.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i)
    y.push_back(class_index(classes, ds.label_of(i)));
  return y;
}

NeuralConfig neural_config_from(const KvConfig& hyper, ModelKind kind) {
  NeuralConfig config;
  config.embed_dim =
      static_cast<std::size_t>(hyper.get_long("embed_dim", 100));
  if (kind == ModelKind::cnn) {
    config.n_filters = static_cast<int>(hyper.get_long("n_filters", 64));
    config.dropout = hyper.get_double("dropout", 0.5);
    if (auto ks = hyper.get("kernel_sizes"))
      config.kernel_sizes = parse_int_list("kernel_sizes", *ks);
  } else {
    config.hidden = static_cast<std::size_t>(hyper.get_long("hidden", 32));
    config.head_hidden =
        static_cast<std::size_t>(hyper.get_long("head_hidden", 16));
  }
  return config;
}

NeuralHyper neural_hyper_from(const KvConfig& hyper) {
  NeuralHyper out;
  out.epochs = static_cast<int>(hyper.get_long("epochs", 20));
  out.batch_size = static_cast<int>(hyper.get_long("batch_size", 32));
  out.learning_rate = hyper.get_double("learning_rate", 0.05);
  out.clip_norm = hyper.get_double("clip_norm", 5.0);
  return out;
}

ForestParams forest_params_from(const KvConfig& hyper) {
  ForestParams params;
  params.n_trees = static_cast<int>(hyper.get_long("n_trees", 100));
  auto depth = hyper.get_or("max_depth", "none");
  params.max_depth =
      depth == "none" ? -1 : parse_int_list("max_depth", depth).front();
  params.features_per_split =
      static_cast<int>(hyper.get_long("features_per_split", 0));
  params.min_samples_split =
      static_cast<int>(hyper.get_long("min_samples_split", 2));
  params.bootstrap = hyper.get_bool("bootstrap", true);
  return params;
}

struct PipelineTrainer : Trainer {
  RunConfig config;
  VerbLexicon lexicon;

  std::unique_ptr<Predictor> fit(const Dataset& train) const override {
    return train_pipeline(config, lexicon, train);
  }
};

}  // namespace

std::vector<std::string> TrainedPipeline::predict_texts(
    const std::vector<std::string>& texts) const {
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(texts.size());
  for (const auto& text : texts)
    corpus.push_back(preprocess_text(text, config.preprocess_mode, lexicon,
                                     config.drop_hashtag_body));

  std::vector<int> y_pred;
  if (is_neural(config.model)) {
    const auto& net = std::get<NeuralModel>(model);
    auto sequences = encode_batch(corpus, *vocab, max_len);
    y_pred.reserve(sequences.size());
    for (const auto& seq : sequences) {
      auto probs = net.forward(seq);
      y_pred.push_back(static_cast<int>(
          std::max_element(probs.begin(), probs.end()) - probs.begin()));
    }
  } else {
    auto X = transform_tfidf_batch(*tfidf, corpus);
    if (config.model == ModelKind::forest)
      y_pred = predict_forest(std::get<ForestModel>(model), X);
    else
      y_pred = predict_linear(std::get<LinearModel>(model), X);
  }

  std::vector<std::string> out;
  out.reserve(y_pred.size());
  for (int label : y_pred) out.push_back(classes[static_cast<std::size_t>(label)]);
  return out;
}

std::vector<std::string> TrainedPipeline::predict(const Dataset& ds) const {
  std::vector<std::string> texts;
  texts.reserve(ds.size());
  for (const auto& ex : ds.examples) texts.push_back(ex.raw_text);
  return predict_texts(texts);
}

std::unique_ptr<Trainer> make_trainer(const RunConfig& config,
                                      const VerbLexicon& lexicon) {
  validate_hyper(config.model, config.hyper);
  auto trainer = std::make_unique<PipelineTrainer>();
  trainer->config = config;
  trainer->lexicon = lexicon;
  return trainer;
}

std::unique_ptr<TrainedPipeline> train_pipeline(const RunConfig& config,
                                                const VerbLexicon& lexicon,
                                                const Dataset& train) {
  validate_hyper(config.model, config.hyper);
  if (train.task != config.task)
    throw ValidationError("train_pipeline: dataset task does not match config");

  Dataset ds = config.augment.enabled
                   ? augment_minority(train, config.augment.target_ratio,
                                      config.seed)
                   : train;

  auto pipeline = std::make_unique<TrainedPipeline>();
  pipeline->config = config;
  pipeline->classes = task_classes(config.task);
  pipeline->lexicon = lexicon;

  auto corpus = preprocess_corpus(ds, config.preprocess_mode, lexicon,
                                  config.drop_hashtag_body);
  auto y = encode_labels(ds, pipeline->classes);
  const int n_classes = static_cast<int>(pipeline->classes.size());
  const KvConfig& hyper = config.hyper;

  if (is_neural(config.model)) {
    pipeline->vocab = build_vocabulary(corpus);
    pipeline->max_len = std::max<std::size_t>(1, max_corpus_length(corpus));

    EncodedDataset data;
    data.sequences = encode_batch(corpus, *pipeline->vocab, pipeline->max_len);
    data.labels = y;
    data.n_classes = n_classes;
    data.vocab_rows = pipeline->vocab->rows();
    data.max_len = pipeline->max_len;

    auto kind = config.model == ModelKind::cnn    ? NeuralModel::Kind::cnn
                : config.model == ModelKind::lstm ? NeuralModel::Kind::lstm
                                                  : NeuralModel::Kind::gru;
    auto result = train_neural(kind, data, neural_config_from(hyper, config.model),
                               neural_hyper_from(hyper), config.seed);
    pipeline->final_train_loss = result.epoch_losses.back();
    pipeline->has_loss = true;
    pipeline->model = std::move(result.model);
  } else {
    pipeline->tfidf = fit_tfidf(corpus);
    auto X = transform_tfidf_batch(*pipeline->tfidf, corpus);
    const std::size_t n_features = pipeline->tfidf->n_features();

    if (config.model == ModelKind::logreg) {
      LogregHyper h;
      h.l2 = hyper.get_double("l2", h.l2);
      h.learning_rate = hyper.get_double("learning_rate", h.learning_rate);
      h.epochs = static_cast<int>(hyper.get_long("epochs", h.epochs));
      h.batch_size = static_cast<int>(hyper.get_long("batch_size", h.batch_size));
      auto m = train_logreg(X, y, n_classes, n_features, h, config.seed);
      pipeline->final_train_loss = logreg_loss(X, y, m.weights, m.bias, h.l2);
      pipeline->has_loss = true;
      pipeline->model = std::move(m);
    } else if (config.model == ModelKind::svm) {
      SvmHyper h;
      h.c = hyper.get_double("c", h.c);
      h.learning_rate = hyper.get_double("learning_rate", h.learning_rate);
      h.epochs = static_cast<int>(hyper.get_long("epochs", h.epochs));
      auto m = train_linear_svm(X, y, n_classes, n_features, h, config.seed);
      pipeline->final_train_loss =
          svm_loss(X, y, n_classes, m.weights, m.bias, h.c);
      pipeline->has_loss = true;
      pipeline->model = std::move(m);
    } else {
      pipeline->model = train_forest(X, y, n_classes, n_features,
                                     forest_params_from(hyper), config.seed);
    }
  }

  // training-set accuracy diagnostic
  std::vector<std::string> y_true;
  y_true.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) y_true.push_back(ds.label_of(i));
  pipeline->train_accuracy = accuracy(y_true, pipeline->predict(ds));
  return pipeline;
}

}  // namespace offlang
