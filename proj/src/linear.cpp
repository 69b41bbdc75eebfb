#include "offlang/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "offlang/errors.hpp"
#include "offlang/rng.hpp"

namespace offlang {

namespace {

double dot(const std::vector<double>& w, const SparseVector& x) {
  double s = 0.0;
  for (const auto& [col, val] : x.pairs) s += w[static_cast<std::size_t>(col)] * val;
  return s;
}

void axpy(double a, const SparseVector& x, std::vector<double>& w) {
  for (const auto& [col, val] : x.pairs) w[static_cast<std::size_t>(col)] += a * val;
}

std::vector<double> softmax_logits(const std::vector<double>& z) {
  double m = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

void check_labels(const std::vector<SparseVector>& X, const std::vector<int>& y,
                  int n_classes, const char* op) {
  if (X.size() != y.size() || X.size() < 2)
    throw ValidationError(std::string(op) + ": need |X| = |y| >= 2");
  std::vector<bool> present(static_cast<std::size_t>(n_classes), false);
  for (int label : y) {
    if (label < 0 || label >= n_classes)
      throw ValidationError(std::string(op) + ": label out of range");
    present[static_cast<std::size_t>(label)] = true;
  }
  int distinct = static_cast<int>(std::count(present.begin(), present.end(), true));
  if (distinct < 2)
    throw ValidationError(std::string(op) + ": training data has a single class");
}

// +1/-1 target of one-vs-rest row r (binary svm keeps a single row for class 1).
inline double ovr_sign(int label, int row, int rows) {
  if (rows == 1) return label == 1 ? 1.0 : -1.0;
  return label == row ? 1.0 : -1.0;
}

}  // namespace

std::vector<double> LinearModel::scores(const SparseVector& x) const {
  if (!x.pairs.empty() &&
      static_cast<std::size_t>(x.pairs.back().first) >= n_features)
    throw ValidationError("predict: feature column exceeds model dimension");
  if (kind == Kind::svm && n_classes == 2) {
    double s = dot(weights[0], x) + bias[0];
    return {-s, s};
  }
  std::vector<double> out(weights.size());
  for (std::size_t r = 0; r < weights.size(); ++r)
    out[r] = dot(weights[r], x) + bias[r];
  return out;
}

double logreg_loss(const std::vector<SparseVector>& X, const std::vector<int>& y,
                   const std::vector<std::vector<double>>& weights,
                   const std::vector<double>& bias, double l2) {
  double ce = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    std::vector<double> z(weights.size());
    for (std::size_t r = 0; r < weights.size(); ++r)
      z[r] = dot(weights[r], X[i]) + bias[r];
    auto p = softmax_logits(z);
    ce -= std::log(std::max(p[static_cast<std::size_t>(y[i])], 1e-300));
  }
  ce /= static_cast<double>(X.size());
  double reg = 0.0;
  for (const auto& row : weights)
    for (double w : row) reg += w * w;
  return ce + 0.5 * l2 * reg;
}

void logreg_gradient(const std::vector<SparseVector>& X, const std::vector<int>& y,
                     const std::vector<std::vector<double>>& weights,
                     const std::vector<double>& bias, double l2,
                     std::vector<std::vector<double>>& grad_w,
                     std::vector<double>& grad_b) {
  const std::size_t rows = weights.size();
  grad_w.assign(rows, std::vector<double>(weights[0].size(), 0.0));
  grad_b.assign(rows, 0.0);
  const double inv_n = 1.0 / static_cast<double>(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    std::vector<double> z(rows);
    for (std::size_t r = 0; r < rows; ++r) z[r] = dot(weights[r], X[i]) + bias[r];
    auto p = softmax_logits(z);
    for (std::size_t r = 0; r < rows; ++r) {
      double delta = (p[r] - (static_cast<int>(r) == y[i] ? 1.0 : 0.0)) * inv_n;
      axpy(delta, X[i], grad_w[r]);
      grad_b[r] += delta;
    }
  }
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t f = 0; f < weights[r].size(); ++f)
      grad_w[r][f] += l2 * weights[r][f];
}

double svm_loss(const std::vector<SparseVector>& X, const std::vector<int>& y,
                int n_classes, const std::vector<std::vector<double>>& weights,
                const std::vector<double>& bias, double c) {
  const int rows = static_cast<int>(weights.size());
  double hinge_sum = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (int r = 0; r < rows; ++r) {
      double s = dot(weights[static_cast<std::size_t>(r)], X[i]) +
                 bias[static_cast<std::size_t>(r)];
      double margin = ovr_sign(y[i], r, rows) * s;
      hinge_sum += std::max(0.0, 1.0 - margin);
    }
  }
  (void)n_classes;
  double reg = 0.0;
  for (const auto& row : weights)
    for (double w : row) reg += w * w;
  return 0.5 * reg + c * hinge_sum;
}

void svm_gradient(const std::vector<SparseVector>& X, const std::vector<int>& y,
                  int n_classes, const std::vector<std::vector<double>>& weights,
                  const std::vector<double>& bias, double c,
                  std::vector<std::vector<double>>& grad_w,
                  std::vector<double>& grad_b) {
  (void)n_classes;
  const int rows = static_cast<int>(weights.size());
  grad_w = weights;  // d/dw of (1/2)||w||^2
  grad_b.assign(weights.size(), 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (int r = 0; r < rows; ++r) {
      auto ur = static_cast<std::size_t>(r);
      double s = dot(weights[ur], X[i]) + bias[ur];
      double sign = ovr_sign(y[i], r, rows);
      if (sign * s < 1.0) {  // margin violation, hinge is active
        axpy(-c * sign, X[i], grad_w[ur]);
        grad_b[ur] -= c * sign;
      }
    }
  }
}

LinearModel train_logreg(const std::vector<SparseVector>& X,
                         const std::vector<int>& y, int n_classes,
                         std::size_t n_features, const LogregHyper& hyper,
                         std::uint64_t seed) {
  check_labels(X, y, n_classes, "train_logreg");
  LinearModel model;
  model.kind = LinearModel::Kind::logreg;
  model.n_classes = n_classes;
  model.n_features = n_features;
  model.weights.assign(static_cast<std::size_t>(n_classes),
                       std::vector<double>(n_features, 0.0));
  model.bias.assign(static_cast<std::size_t>(n_classes), 0.0);

  const std::size_t n = X.size();
  const std::size_t batch =
      std::min<std::size_t>(std::max(1, hyper.batch_size), n);
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<std::vector<double>> gw;
  std::vector<double> gb;
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    double lr = hyper.learning_rate / std::sqrt(static_cast<double>(epoch));
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch) {
      std::size_t stop = std::min(n, start + batch);
      gw.assign(model.weights.size(),
                std::vector<double>(n_features, 0.0));
      gb.assign(model.bias.size(), 0.0);
      const double inv_b = 1.0 / static_cast<double>(stop - start);
      for (std::size_t b = start; b < stop; ++b) {
        const SparseVector& x = X[order[b]];
        std::vector<double> z(model.weights.size());
        for (std::size_t r = 0; r < model.weights.size(); ++r)
          z[r] = dot(model.weights[r], x) + model.bias[r];
        auto p = softmax_logits(z);
        for (std::size_t r = 0; r < model.weights.size(); ++r) {
          double delta =
              (p[r] - (static_cast<int>(r) == y[order[b]] ? 1.0 : 0.0)) * inv_b;
          axpy(delta, x, gw[r]);
          gb[r] += delta;
        }
      }
      // decay form of the l2 step, clamped so extreme l2 stays stable
      const double decay = std::max(0.0, 1.0 - lr * hyper.l2);
      for (std::size_t r = 0; r < model.weights.size(); ++r) {
        for (std::size_t f = 0; f < n_features; ++f)
          model.weights[r][f] = model.weights[r][f] * decay - lr * gw[r][f];
        model.bias[r] -= lr * gb[r];
      }
    }
  }
  return model;
}

LinearModel train_linear_svm(const std::vector<SparseVector>& X,
                             const std::vector<int>& y, int n_classes,
                             std::size_t n_features, const SvmHyper& hyper,
                             std::uint64_t seed) {
  check_labels(X, y, n_classes, "train_linear_svm");
  LinearModel model;
  model.kind = LinearModel::Kind::svm;
  model.n_classes = n_classes;
  model.n_features = n_features;
  const std::size_t rows = n_classes == 2 ? 1 : static_cast<std::size_t>(n_classes);
  model.weights.assign(rows, std::vector<double>(n_features, 0.0));
  model.bias.assign(rows, 0.0);
  (void)seed;  // full-batch updates need no sampling

  std::vector<std::vector<double>> gw;
  std::vector<double> gb;
  const double inv_n = 1.0 / static_cast<double>(X.size());
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    // step on the objective scaled by 1/n so the rate is size-independent
    double lr =
        hyper.learning_rate / std::sqrt(static_cast<double>(epoch)) * inv_n;
    svm_gradient(X, y, n_classes, model.weights, model.bias, hyper.c, gw, gb);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t f = 0; f < n_features; ++f)
        model.weights[r][f] -= lr * gw[r][f];
      model.bias[r] -= lr * gb[r];
    }
  }
  return model;
}

std::vector<int> predict_linear(const LinearModel& model,
                                const std::vector<SparseVector>& X) {
  std::vector<int> out;
  out.reserve(X.size());
  for (const auto& x : X) {
    auto z = model.scores(x);
    out.push_back(static_cast<int>(
        std::max_element(z.begin(), z.end()) - z.begin()));
  }
  return out;
}

}  // namespace offlang
