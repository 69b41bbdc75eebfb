#include <doctest.h>

#include <set>

#include "offlang/errors.hpp"
#include "offlang/evaluation.hpp"
#include "offlang/preprocess.hpp"

using namespace offlang;

namespace {

const std::vector<std::string> kAB = {"NOT", "OFF"};

// trainer that always predicts one label
struct ConstantTrainer : Trainer {
  std::string label;

  struct P : Predictor {
    std::string label;
    std::vector<std::string> predict(const Dataset& ds) const override {
      return std::vector<std::string>(ds.size(), label);
    }
  };

  std::unique_ptr<Predictor> fit(const Dataset&) const override {
    auto p = std::make_unique<P>();
    p->label = label;
    return p;
  }
};

// trainer that predicts the training majority class
struct MajorityTrainer : Trainer {
  struct P : Predictor {
    std::string label;
    std::vector<std::string> predict(const Dataset& ds) const override {
      return std::vector<std::string>(ds.size(), label);
    }
  };

  std::unique_ptr<Predictor> fit(const Dataset& train) const override {
    int off = 0;
    for (std::size_t i = 0; i < train.size(); ++i)
      off += (train.label_of(i) == "OFF") ? 1 : -1;
    auto p = std::make_unique<P>();
    p->label = off > 0 ? "OFF" : "NOT";
    return p;
  }
};

Dataset binary_dataset(int n_off, int n_not) {
  Dataset ds;
  ds.task = Task::A;
  int id = 0;
  for (int i = 0; i < n_off; ++i)
    ds.examples.push_back({"o" + std::to_string(++id), "bad stuff", "OFF", {}, {}});
  for (int i = 0; i < n_not; ++i)
    ds.examples.push_back({"n" + std::to_string(++id), "good stuff", "NOT", {}, {}});
  return ds;
}

}  // namespace

TEST_CASE("confusion: hand-counted fixture") {
  auto c = confusion({"OFF", "NOT", "OFF", "NOT"}, {"OFF", "OFF", "OFF", "NOT"},
                     kAB);
  auto at = [&](const std::string& cls) {
    for (std::size_t i = 0; i < c.classes.size(); ++i)
      if (c.classes[i] == cls) return i;
    FAIL("class missing");
    return std::size_t{0};
  };
  CHECK(c.tp[at("OFF")] == 2);
  CHECK(c.fp[at("OFF")] == 1);
  CHECK(c.fn[at("OFF")] == 0);
  CHECK(c.tp[at("NOT")] == 1);
  CHECK(c.fp[at("NOT")] == 0);
  CHECK(c.fn[at("NOT")] == 1);
  for (std::size_t i = 0; i < c.classes.size(); ++i)
    CHECK(c.tp[i] + c.fp[i] + c.fn[i] + c.tn[i] == 4);
}

TEST_CASE("confusion: error contracts") {
  CHECK_THROWS_AS(confusion({"OFF"}, {}, kAB), ValidationError);
  CHECK_THROWS_AS(confusion({}, {}, kAB), ValidationError);
  CHECK_THROWS_AS(confusion({"XXX"}, {"OFF"}, kAB), ValidationError);
}

TEST_CASE("macro_f1: hand-computed value 11/15") {
  auto c = confusion({"OFF", "NOT", "OFF", "NOT"}, {"OFF", "OFF", "OFF", "NOT"},
                     kAB);
  CHECK(std::abs(macro_f1(c) - 11.0 / 15.0) < 1e-12);
  auto f1 = per_class_f1(c);
  CHECK(f1.at("OFF") == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(f1.at("NOT") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("macro_f1: perfect and degenerate") {
  auto perfect = confusion({"OFF", "NOT"}, {"OFF", "NOT"}, kAB);
  CHECK(macro_f1(perfect) == 1.0);

  // a predictor that never emits NOT drags the macro down
  auto off_only = confusion({"OFF", "NOT"}, {"OFF", "OFF"}, kAB);
  auto f1 = per_class_f1(off_only);
  CHECK(f1.at("NOT") == 0.0);
  CHECK(macro_f1(off_only) < 0.5);

  // absent-from-both class contributes a zero (0/0 -> 0)
  auto c3 = confusion({"IND", "GRP"}, {"IND", "GRP"}, {"GRP", "IND", "OTH"});
  CHECK(macro_f1(c3) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("accuracy") {
  CHECK(accuracy({"a", "b", "c", "d"}, {"a", "b", "c", "x"}) == 0.75);
  CHECK(accuracy({"a"}, {"a"}) == 1.0);
  CHECK(accuracy({"a", "b"}, {"b", "a"}) == 0.0);
  CHECK_THROWS_AS(accuracy({}, {}), ValidationError);
  CHECK_THROWS_AS(accuracy({"a"}, {"a", "b"}), ValidationError);
}

TEST_CASE("cross_validate: constant trainer on a balanced set") {
  ConstantTrainer trainer;
  trainer.label = "OFF";
  auto ds = binary_dataset(10, 10);
  auto report = cross_validate(trainer, ds, 5, 3);
  REQUIRE(report.per_fold.size() == 5);
  for (const auto& fold : report.per_fold) {
    CHECK(fold.accuracy == doctest::Approx(0.5));
    CHECK(fold.n == 4);
  }
  CHECK(report.mean_accuracy == doctest::Approx(0.5));

  double mean = 0.0;
  for (const auto& fold : report.per_fold) mean += fold.macro_f1;
  mean /= 5.0;
  CHECK(std::abs(mean - report.mean_macro_f1) < 1e-12);
}

TEST_CASE("cross_validate: fold failure names the fold") {
  struct Failing : Trainer {
    std::unique_ptr<Predictor> fit(const Dataset&) const override {
      throw ValidationError("boom");
    }
  };
  CHECK_THROWS_WITH_AS(cross_validate(Failing{}, binary_dataset(5, 5), 5, 1),
                       doctest::Contains("fold 0"), TrainingError);
}

TEST_CASE("cross_validate: no vocabulary leakage from validation folds") {
  // the sentinel word appears in exactly one example; whichever fold holds it
  // must not have it in the fitted vocabulary of that iteration
  struct VocabProbe : Trainer {
    mutable std::vector<bool>* sentinel_in_vocab;
    mutable std::vector<std::set<std::string>>* train_ids;

    struct P : Predictor {
      std::vector<std::string> predict(const Dataset& ds) const override {
        return std::vector<std::string>(ds.size(), "NOT");
      }
    };

    std::unique_ptr<Predictor> fit(const Dataset& train) const override {
      std::vector<std::vector<std::string>> corpus;
      for (const auto& ex : train.examples)
        corpus.push_back(tokenize(clean(ex.raw_text)));
      auto vocab = build_vocabulary(corpus);
      sentinel_in_vocab->push_back(vocab.contains("zyzzyx"));
      std::set<std::string> ids;
      for (const auto& ex : train.examples) ids.insert(ex.id);
      train_ids->push_back(ids);
      return std::make_unique<P>();
    }
  };

  auto ds = binary_dataset(6, 6);
  ds.examples[3].raw_text = "bad stuff zyzzyx";  // the only sentinel carrier
  const std::string carrier = ds.examples[3].id;

  std::vector<bool> seen;
  std::vector<std::set<std::string>> train_ids;
  VocabProbe trainer;
  trainer.sentinel_in_vocab = &seen;
  trainer.train_ids = &train_ids;
  cross_validate(trainer, ds, 4, 17);

  REQUIRE(seen.size() == 4);
  int folds_without = 0;
  for (std::size_t f = 0; f < 4; ++f) {
    bool carrier_in_train = train_ids[f].count(carrier) == 1;
    CHECK(seen[f] == carrier_in_train);
    folds_without += !carrier_in_train;
  }
  CHECK(folds_without == 1);  // the carrier was validation data exactly once
}

TEST_CASE("grid_search: ordering, ties and scores") {
  auto ds = binary_dataset(14, 6);

  auto factory = [](const KvConfig& config) -> std::unique_ptr<Trainer> {
    if (config.get_or("kind", "const") == "majority")
      return std::make_unique<MajorityTrainer>();
    auto t = std::make_unique<ConstantTrainer>();
    t->label = "NOT";  // minority: scores poorly on this imbalanced set
    return t;
  };

  KvConfig c_const, c_major;
  c_const.set("kind", "const");
  c_major.set("kind", "majority");

  SUBCASE("the better config wins") {
    auto result = grid_search(factory, {c_const, c_major}, ds, 4, 9);
    REQUIRE(result.all.size() == 2);
    CHECK(result.best_config == c_major);
    CHECK(result.best_score == result.all[1].second);
    CHECK(result.all[0].first == c_const);
    double best = std::max(result.all[0].second, result.all[1].second);
    CHECK(result.best_score == best);
  }
  SUBCASE("singleton grid returns that config") {
    auto result = grid_search(factory, {c_major}, ds, 4, 9);
    CHECK(result.best_config == c_major);
  }
  SUBCASE("duplicate configs: first occurrence wins") {
    auto result = grid_search(factory, {c_major, c_major, c_const}, ds, 4, 9);
    CHECK(result.best_config == c_major);
    CHECK(result.all.size() == 3);
    CHECK(result.all[0].second == result.all[1].second);
  }
  SUBCASE("empty grid is an error") {
    CHECK_THROWS_AS(grid_search(factory, {}, ds, 4, 9), ValidationError);
  }
  SUBCASE("same partitions for every config: bit-equal repeat runs") {
    auto r1 = grid_search(factory, {c_const, c_major}, ds, 4, 9);
    auto r2 = grid_search(factory, {c_const, c_major}, ds, 4, 9);
    CHECK(r1.all == r2.all);
    CHECK(r1.best_score == r2.best_score);
  }
}

TEST_CASE("grid_search: trainer errors carry the offending config") {
  struct Failing : Trainer {
    std::unique_ptr<Predictor> fit(const Dataset&) const override {
      throw ValidationError("nope");
    }
  };
  auto factory = [](const KvConfig&) -> std::unique_ptr<Trainer> {
    return std::make_unique<Failing>();
  };
  KvConfig c;
  c.set("alpha", "3");
  CHECK_THROWS_WITH_AS(grid_search(factory, {c}, binary_dataset(4, 4), 4, 2),
                       doctest::Contains("alpha=3"), TrainingError);
}
