#include <doctest.h>

#include <cmath>

#include "offlang/errors.hpp"
#include "offlang/linear.hpp"
#include "offlang/rng.hpp"

using namespace offlang;

namespace {

SparseVector dense2(double a, double b) {
  SparseVector v;
  if (a != 0.0) v.pairs.emplace_back(0, a);
  if (b != 0.0) v.pairs.emplace_back(1, b);
  return v;
}

// two well-separated clusters at (-5,-5) and (5,5) with +-1 jitter
void separable_clusters(std::vector<SparseVector>& X, std::vector<int>& y) {
  Rng rng(55);
  for (int i = 0; i < 5; ++i) {
    X.push_back(dense2(-5 + rng.uniform(-1, 1), -5 + rng.uniform(-1, 1)));
    y.push_back(0);
  }
  for (int i = 0; i < 5; ++i) {
    X.push_back(dense2(5 + rng.uniform(-1, 1), 5 + rng.uniform(-1, 1)));
    y.push_back(1);
  }
}

void xor_points(std::vector<SparseVector>& X, std::vector<int>& y) {
  X = {dense2(0, 0), dense2(0, 1), dense2(1, 0), dense2(1, 1)};
  y = {0, 1, 1, 0};
}

double train_accuracy(const LinearModel& m, const std::vector<SparseVector>& X,
                      const std::vector<int>& y) {
  auto pred = predict_linear(m, X);
  int hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += (pred[i] == y[i]);
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

double weight_norm(const LinearModel& m) {
  double s = 0.0;
  for (const auto& row : m.weights)
    for (double w : row) s += w * w;
  return std::sqrt(s);
}

// random sparse problems for the finite-difference gradient checks
void random_problem(std::vector<SparseVector>& X, std::vector<int>& y,
                    std::uint64_t seed, int n = 8, int features = 5,
                    int classes = 3) {
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    SparseVector v;
    for (int f = 0; f < features; ++f)
      if (rng.next_double() < 0.7) v.pairs.emplace_back(f, rng.uniform(-2, 2));
    X.push_back(std::move(v));
    y.push_back(static_cast<int>(rng.uniform_index(static_cast<std::size_t>(classes))));
  }
  // make sure at least two classes are present
  y[0] = 0;
  y[1] = 1;
}

}  // namespace

TEST_CASE("logreg: separable clusters reach training accuracy 1.0") {
  std::vector<SparseVector> X;
  std::vector<int> y;
  separable_clusters(X, y);
  auto m = train_logreg(X, y, 2, 2, LogregHyper{}, 1);
  CHECK(train_accuracy(m, X, y) == 1.0);
  CHECK(m.weights.size() == 2);  // binary logreg keeps two rows
}

TEST_CASE("logreg: XOR is not linearly separable") {
  std::vector<SparseVector> X;
  std::vector<int> y;
  xor_points(X, y);
  auto m = train_logreg(X, y, 2, 2, LogregHyper{}, 1);
  CHECK(train_accuracy(m, X, y) <= 0.75);
}

TEST_CASE("logreg: final loss <= initial loss") {
  std::vector<SparseVector> X;
  std::vector<int> y;
  separable_clusters(X, y);
  LogregHyper hyper;
  std::vector<std::vector<double>> w0(2, std::vector<double>(2, 0.0));
  std::vector<double> b0(2, 0.0);
  double initial = logreg_loss(X, y, w0, b0, hyper.l2);
  auto m = train_logreg(X, y, 2, 2, hyper, 1);
  CHECK(logreg_loss(X, y, m.weights, m.bias, hyper.l2) <= initial);
}

TEST_CASE("logreg: stronger l2 shrinks the weights") {
  std::vector<SparseVector> X;
  std::vector<int> y;
  separable_clusters(X, y);
  LogregHyper weak, strong;
  weak.l2 = 0.01;
  strong.l2 = 100.0;
  auto m_weak = train_logreg(X, y, 2, 2, weak, 1);
  auto m_strong = train_logreg(X, y, 2, 2, strong, 1);
  CHECK(weight_norm(m_strong) < weight_norm(m_weak));
}

TEST_CASE("logreg: analytic gradient matches central differences") {
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    std::vector<SparseVector> X;
    std::vector<int> y;
    random_problem(X, y, seed);
    Rng rng(seed + 100);
    std::vector<std::vector<double>> w(3, std::vector<double>(5));
    std::vector<double> b(3);
    for (auto& row : w)
      for (double& v : row) v = rng.uniform(-0.5, 0.5);
    for (double& v : b) v = rng.uniform(-0.5, 0.5);
    const double l2 = 0.01;

    std::vector<std::vector<double>> gw;
    std::vector<double> gb;
    logreg_gradient(X, y, w, b, l2, gw, gb);

    const double h = 1e-5;
    double worst = 0.0;
    auto check = [&](double& theta, double analytic) {
      double saved = theta;
      theta = saved + h;
      double up = logreg_loss(X, y, w, b, l2);
      theta = saved - h;
      double down = logreg_loss(X, y, w, b, l2);
      theta = saved;
      double numeric = (up - down) / (2 * h);
      if (std::abs(analytic - numeric) <= 1e-8) return;  // exact-zero gradients
      double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    };
    for (std::size_t r = 0; r < w.size(); ++r) {
      for (std::size_t f = 0; f < w[r].size(); ++f) check(w[r][f], gw[r][f]);
      check(b[r], gb[r]);
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("svm: separable clusters reach training accuracy 1.0") {
  std::vector<SparseVector> X;
  std::vector<int> y;
  separable_clusters(X, y);
  auto m = train_linear_svm(X, y, 2, 2, SvmHyper{}, 1);
  CHECK(train_accuracy(m, X, y) == 1.0);
  CHECK(m.weights.size() == 1);  // binary svm keeps a single row
}

TEST_CASE("svm: final loss is below the zero-weight starting loss") {
  std::vector<SparseVector> X;
  std::vector<int> y;
  separable_clusters(X, y);
  SvmHyper hyper;
  std::vector<std::vector<double>> w0(1, std::vector<double>(2, 0.0));
  std::vector<double> b0(1, 0.0);
  double initial = svm_loss(X, y, 2, w0, b0, hyper.c);
  auto m = train_linear_svm(X, y, 2, 2, hyper, 1);
  CHECK(svm_loss(X, y, 2, m.weights, m.bias, hyper.c) < initial);
}

TEST_CASE("svm: a point on the boundary has margin 0 and hinge loss 1") {
  std::vector<SparseVector> X = {dense2(0, 0)};
  std::vector<int> y = {1};
  std::vector<std::vector<double>> w = {{1.0, 1.0}};  // score(0,0) = 0
  std::vector<double> b = {0.0};
  double loss = svm_loss(X, y, 2, w, b, 1.0);
  CHECK(loss == doctest::Approx(0.5 * 2.0 + 1.0));  // reg + one full hinge
}

TEST_CASE("svm: three one-vs-rest rows on a 3-class toy") {
  Rng rng(7);
  std::vector<SparseVector> X;
  std::vector<int> y;
  const double centers[3][2] = {{-6, 0}, {6, 0}, {0, 8}};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 4; ++i) {
      X.push_back(dense2(centers[c][0] + rng.uniform(-1, 1),
                         centers[c][1] + rng.uniform(-1, 1)));
      y.push_back(c);
    }
  auto m = train_linear_svm(X, y, 3, 2, SvmHyper{}, 1);
  CHECK(m.weights.size() == 3);
  CHECK(train_accuracy(m, X, y) == 1.0);
}

TEST_CASE("svm: analytic subgradient matches central differences") {
  for (std::uint64_t seed : {44u, 55u, 66u}) {
    std::vector<SparseVector> X;
    std::vector<int> y;
    random_problem(X, y, seed);
    Rng rng(seed + 200);
    std::vector<std::vector<double>> w(3, std::vector<double>(5));
    std::vector<double> b(3);
    for (auto& row : w)
      for (double& v : row) v = rng.uniform(-0.5, 0.5);
    for (double& v : b) v = rng.uniform(-0.5, 0.5);
    const double c = 0.7;

    // the subgradient equals the gradient only away from the hinge kink;
    // require every margin to clear it by more than the probe step can move
    double closest = 1e9;
    for (std::size_t i = 0; i < X.size(); ++i) {
      for (std::size_t r = 0; r < w.size(); ++r) {
        double s = b[r];
        for (const auto& [col, val] : X[i].pairs)
          s += w[r][static_cast<std::size_t>(col)] * val;
        double sign = (static_cast<int>(r) == y[i]) ? 1.0 : -1.0;
        closest = std::min(closest, std::abs(sign * s - 1.0));
      }
    }
    REQUIRE(closest > 1e-3);

    std::vector<std::vector<double>> gw;
    std::vector<double> gb;
    svm_gradient(X, y, 3, w, b, c, gw, gb);

    const double h = 1e-5;
    double worst = 0.0;
    auto check = [&](double& theta, double analytic) {
      double saved = theta;
      theta = saved + h;
      double up = svm_loss(X, y, 3, w, b, c);
      theta = saved - h;
      double down = svm_loss(X, y, 3, w, b, c);
      theta = saved;
      double numeric = (up - down) / (2 * h);
      if (std::abs(analytic - numeric) <= 1e-8) return;  // exact-zero gradients
      double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    };
    for (std::size_t r = 0; r < w.size(); ++r) {
      for (std::size_t f = 0; f < w[r].size(); ++f) check(w[r][f], gw[r][f]);
      check(b[r], gb[r]);
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("predict_linear: tie-breaks and invariances") {
  SUBCASE("zero model predicts class 0 everywhere") {
    LinearModel m;
    m.kind = LinearModel::Kind::logreg;
    m.n_classes = 3;
    m.n_features = 2;
    m.weights.assign(3, std::vector<double>(2, 0.0));
    m.bias.assign(3, 0.0);
    auto pred = predict_linear(m, {dense2(1, 2), dense2(-3, 4)});
    CHECK(pred == std::vector<int>{0, 0});
  }
  SUBCASE("adding a constant to every class score changes nothing") {
    std::vector<SparseVector> X;
    std::vector<int> y;
    separable_clusters(X, y);
    auto m = train_logreg(X, y, 2, 2, LogregHyper{}, 1);
    auto base = predict_linear(m, X);
    auto shifted = m;
    for (auto& v : shifted.bias) v += 17.5;
    CHECK(predict_linear(shifted, X) == base);
  }
  SUBCASE("dimension mismatch is an error") {
    LinearModel m;
    m.kind = LinearModel::Kind::logreg;
    m.n_classes = 2;
    m.n_features = 2;
    m.weights.assign(2, std::vector<double>(2, 0.0));
    m.bias.assign(2, 0.0);
    SparseVector too_wide;
    too_wide.pairs.emplace_back(5, 1.0);
    CHECK_THROWS_AS(predict_linear(m, {too_wide}), ValidationError);
  }
}

TEST_CASE("training rejects degenerate label sets") {
  std::vector<SparseVector> X = {dense2(1, 0), dense2(0, 1)};
  std::vector<int> single = {1, 1};
  CHECK_THROWS_AS(train_logreg(X, single, 2, 2, LogregHyper{}, 0),
                  ValidationError);
  CHECK_THROWS_AS(train_linear_svm(X, single, 2, 2, SvmHyper{}, 0),
                  ValidationError);
}

TEST_CASE("training is deterministic for a fixed seed") {
  std::vector<SparseVector> X;
  std::vector<int> y;
  separable_clusters(X, y);
  auto a = train_logreg(X, y, 2, 2, LogregHyper{}, 9);
  auto b = train_logreg(X, y, 2, 2, LogregHyper{}, 9);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
}
