#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "offlang/features.hpp"

namespace offlang {

// Linear classifier over sparse features. Logistic regression keeps one
// weight row per class (softmax); the binary SVM keeps a single row with a
// sign decision, multiclass SVM one one-vs-rest row per class.
struct LinearModel {
  enum class Kind { logreg, svm };

  Kind kind = Kind::logreg;
  int n_classes = 0;
  std::size_t n_features = 0;
  std::vector<std::vector<double>> weights;  // [rows][n_features]
  std::vector<double> bias;                  // [rows]

  // Per-class scores for one example (binary svm expands to {-s, +s}).
  std::vector<double> scores(const SparseVector& x) const;
};

struct LogregHyper {
  double l2 = 1e-4;
  double learning_rate = 0.1;
  int epochs = 50;
  int batch_size = 32;
};

struct SvmHyper {
  double c = 1.0;
  double learning_rate = 0.1;
  int epochs = 50;
};

// Softmax cross-entropy with L2 penalty, minimized by mini-batch gradient
// descent with a 1/sqrt(t) step decay. Deterministic for a fixed seed.
LinearModel train_logreg(const std::vector<SparseVector>& X,
                         const std::vector<int>& y, int n_classes,
                         std::size_t n_features, const LogregHyper& hyper,
                         std::uint64_t seed);

// (1/2)||w||^2 + c * sum of hinge losses, minimized by full-batch subgradient
// descent in the primal; one-vs-rest for three or more classes.
LinearModel train_linear_svm(const std::vector<SparseVector>& X,
                             const std::vector<int>& y, int n_classes,
                             std::size_t n_features, const SvmHyper& hyper,
                             std::uint64_t seed);

// Argmax over class scores, ties to the lowest class index.
std::vector<int> predict_linear(const LinearModel& model,
                                const std::vector<SparseVector>& X);

// Objective values and full-batch (sub)gradients, exposed for reporting and
// finite-difference checks.
// Logreg: mean cross-entropy + (l2/2)||W||^2 (bias unpenalized).
double logreg_loss(const std::vector<SparseVector>& X, const std::vector<int>& y,
                   const std::vector<std::vector<double>>& weights,
                   const std::vector<double>& bias, double l2);

void logreg_gradient(const std::vector<SparseVector>& X, const std::vector<int>& y,
                     const std::vector<std::vector<double>>& weights,
                     const std::vector<double>& bias, double l2,
                     std::vector<std::vector<double>>& grad_w,
                     std::vector<double>& grad_b);

// Svm: (1/2)||W||^2 + c * sum_i sum_rows hinge (bias unpenalized).
double svm_loss(const std::vector<SparseVector>& X, const std::vector<int>& y,
                int n_classes, const std::vector<std::vector<double>>& weights,
                const std::vector<double>& bias, double c);

void svm_gradient(const std::vector<SparseVector>& X, const std::vector<int>& y,
                  int n_classes, const std::vector<std::vector<double>>& weights,
                  const std::vector<double>& bias, double c,
                  std::vector<std::vector<double>>& grad_w,
                  std::vector<double>& grad_b);

}  // namespace offlang
