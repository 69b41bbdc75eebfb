#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "offlang/preprocess.hpp"
#include "offlang/rng.hpp"
#include "offlang/tensor.hpp"

namespace offlang {

// Trainable word-id -> vector look-up table. Row 0 (PAD) stays exactly zero
// through training; its gradient is discarded.
struct EmbeddingTable {
  Tensor weights;  // [rows x dim]

  std::size_t rows() const { return weights.dim(0); }
  std::size_t dim() const { return weights.dim(1); }
};

// Row t = table[seq.indices[t]]; PAD positions are zero rows.
Tensor embed(const EmbeddingTable& table, const IndexSequence& seq);

// Numerically stable softmax.
std::vector<double> softmax(const std::vector<double>& logits);

// Training-time dropout: zero each unit with probability p, scale survivors
// by 1/(1-p). Inference is the identity.
std::vector<double> inverted_dropout(const std::vector<double>& x, double p,
                                     Rng& rng);

// ReLU activation maps for one kernel-size group: [n_filters][L-k+1].
std::vector<std::vector<double>> conv1d_relu(const Tensor& x,
                                             const Tensor& filters,
                                             const Tensor& bias);

// Max-over-time pooling of the concatenated per-group maps: [total_filters].
std::vector<double> conv1d_relu_maxpool(const Tensor& x,
                                        const std::vector<Tensor>& filters,
                                        const std::vector<Tensor>& biases);

// Architecture knobs shared by the three model kinds.
struct NeuralConfig {
  std::size_t embed_dim = 100;
  // cnn
  std::vector<int> kernel_sizes = {2, 3, 4};
  int n_filters = 64;
  double dropout = 0.5;
  // rnn
  std::size_t hidden = 32;
  std::size_t head_hidden = 16;
};

struct CnnModel {
  EmbeddingTable embedding;
  std::vector<int> kernel_sizes;
  int n_filters = 0;
  double dropout = 0.0;
  std::vector<Tensor> filters;    // per kernel size: [n_filters x k x E]
  std::vector<Tensor> conv_bias;  // per kernel size: [n_filters]
  Tensor out_w;                   // [n_classes x total_filters]
  Tensor out_b;                   // [n_classes]
  std::size_t max_len = 0;
  int n_classes = 0;

  std::size_t total_filters() const {
    return kernel_sizes.size() * static_cast<std::size_t>(n_filters);
  }
};

// One recurrent unit plus a ReLU linear layer and a softmax output head.
// The head reads the hidden state at the last non-pad position.
struct LstmModel {
  EmbeddingTable embedding;
  std::size_t hidden = 0;
  Tensor w_i, w_f, w_o, w_g;  // [H x (E+H)]
  Tensor b_i, b_f, b_o, b_g;  // [H]
  Tensor head_w, head_b;      // [head x H], [head]
  Tensor out_w, out_b;        // [n_classes x head], [n_classes]
  std::size_t max_len = 0;
  int n_classes = 0;
};

struct GruModel {
  EmbeddingTable embedding;
  std::size_t hidden = 0;
  Tensor w_z, w_r, w_h;  // [H x (E+H)]
  Tensor b_z, b_r, b_h;  // [H]
  Tensor head_w, head_b;
  Tensor out_w, out_b;
  std::size_t max_len = 0;
  int n_classes = 0;
};

struct NeuralModel {
  enum class Kind { cnn, lstm, gru };

  Kind kind = Kind::cnn;
  std::variant<CnnModel, LstmModel, GruModel> net;

  int n_classes() const;
  std::size_t max_len() const;
  std::size_t vocab_rows() const;

  // Inference-mode class probabilities.
  std::vector<double> forward(const IndexSequence& seq) const;
};

NeuralModel::Kind neural_kind_from_string(const std::string& s);
std::string to_string(NeuralModel::Kind kind);

// Class probabilities; contracts as in NeuralModel::forward. cnn_forward in
// train mode applies inverted dropout from `rng`.
std::vector<double> cnn_forward(const CnnModel& model, const IndexSequence& seq,
                                bool train_mode, Rng& rng);
std::vector<double> lstm_forward(const LstmModel& model,
                                 const IndexSequence& seq);
std::vector<double> gru_forward(const GruModel& model, const IndexSequence& seq);

// Fresh model with seeded uniform(-a, a), a = sqrt(6/(fan_in+fan_out))
// initialization; biases zero; PAD row zeroed.
NeuralModel make_neural(NeuralModel::Kind kind, const NeuralConfig& config,
                        int n_classes, std::size_t vocab_rows,
                        std::size_t max_len, std::uint64_t seed);

// Parameter tensors in a fixed order, names stable for serialization.
std::vector<std::pair<std::string, Tensor*>> named_parameters(NeuralModel& model);
std::vector<std::pair<std::string, const Tensor*>> named_parameters(
    const NeuralModel& model);

struct EncodedDataset {
  std::vector<IndexSequence> sequences;
  std::vector<int> labels;
  int n_classes = 0;
  std::size_t vocab_rows = 0;
  std::size_t max_len = 0;
};

struct NeuralHyper {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 0.05;  // decays as lr / sqrt(epoch)
  double clip_norm = 5.0;       // global-norm gradient clipping
};

struct NeuralTrainResult {
  NeuralModel model;
  std::vector<double> epoch_losses;  // mean cross-entropy per epoch
};

// Mini-batch SGD on mean cross-entropy with full backpropagation through
// time. Bit-deterministic for a fixed seed; throws TrainingError naming the
// epoch if the loss stops being finite.
NeuralTrainResult train_neural(NeuralModel::Kind kind, const EncodedDataset& data,
                               const NeuralConfig& config,
                               const NeuralHyper& hyper, std::uint64_t seed);

struct GradCheckConfig {
  int vocab_words = 6;
  std::size_t max_len = 5;
  int true_length = 4;
  std::size_t embed_dim = 3;
  std::size_t hidden = 3;
  std::size_t head_hidden = 3;
  int n_classes = 3;
  std::vector<int> kernel_sizes = {1, 2};
  int n_filters = 2;
  // nonzero lets all-PAD conv windows win the max-pool, exercising the
  // bias-only gradient route
  double conv_bias_init = 0.0;
};

// Max over parameters of |g_analytic - g_numeric| /
// max(|g_analytic|, |g_numeric|, 1e-8), central differences with step 1e-5
// on a single random example. The frozen PAD row is excluded.
double grad_check(NeuralModel::Kind kind, const GradCheckConfig& cfg,
                  std::uint64_t seed);

}  // namespace offlang
