#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "offlang/corpus.hpp"
#include "offlang/errors.hpp"
#include "offlang/model_io.hpp"
#include "offlang/pipeline.hpp"

using namespace offlang;

namespace {

std::string data_path(const char* name) {
  return std::string(OFFLANG_TEST_DATA_DIR) + "/" + name;
}

RunConfig quick_config(ModelKind kind, Task task = Task::A) {
  RunConfig config;
  config.task = task;
  config.model = kind;
  config.seed = 13;
  switch (kind) {
    case ModelKind::logreg:
      config.hyper.set("epochs", "20");
      break;
    case ModelKind::svm:
      config.hyper.set("epochs", "20");
      config.drop_hashtag_body = true;  // exercise the knob end to end
      break;
    case ModelKind::forest:
      config.hyper.set("n_trees", "5");
      break;
    case ModelKind::cnn:
      config.hyper.set("epochs", "3");
      config.hyper.set("n_filters", "3");
      config.hyper.set("kernel_sizes", "1,2");
      config.hyper.set("embed_dim", "6");
      break;
    case ModelKind::lstm:
    case ModelKind::gru:
      config.hyper.set("epochs", "3");
      config.hyper.set("embed_dim", "6");
      config.hyper.set("hidden", "3");
      config.hyper.set("head_hidden", "3");
      break;
  }
  return config;
}

}  // namespace

TEST_CASE("train_pipeline: every model kind fits and predicts the fixture") {
  auto ds = load_olid_tsv(data_path("fixture_a.tsv"), Task::A);
  for (auto kind : {ModelKind::logreg, ModelKind::svm, ModelKind::forest,
                    ModelKind::cnn, ModelKind::lstm, ModelKind::gru}) {
    CAPTURE(to_string(kind));
    auto pipeline = train_pipeline(quick_config(kind), VerbLexicon::builtin(), ds);
    auto labels = pipeline->predict(ds);
    REQUIRE(labels.size() == ds.size());
    for (const auto& label : labels) CHECK((label == "OFF" || label == "NOT"));
  }
}

TEST_CASE("train_pipeline: unknown hyperparameter key is rejected") {
  auto ds = load_olid_tsv(data_path("fixture_a.tsv"), Task::A);
  auto config = quick_config(ModelKind::logreg);
  config.hyper.set("bogus_key", "1");
  CHECK_THROWS_AS(train_pipeline(config, VerbLexicon::builtin(), ds),
                  ValidationError);
  CHECK_THROWS_AS(make_trainer(config, VerbLexicon::builtin()), ValidationError);
}

TEST_CASE("train_pipeline: augmentation balances the task-B fixture") {
  auto ds = load_olid_tsv(data_path("fixture_b.tsv"), Task::B);
  auto config = quick_config(ModelKind::logreg, Task::B);
  config.augment.enabled = true;
  config.augment.target_ratio = 1.0;
  auto pipeline = train_pipeline(config, VerbLexicon::builtin(), ds);
  // trains without error and predicts both classes' labels from the set
  auto labels = pipeline->predict(ds);
  for (const auto& label : labels) CHECK((label == "TIN" || label == "UNT"));
}

TEST_CASE("artifact round-trip: identical predictions for every model kind") {
  auto ds = load_olid_tsv(data_path("fixture_a.tsv"), Task::A);
  auto probe = load_olid_tsv(data_path("unlabeled.tsv"), Task::A);
  for (auto kind : {ModelKind::logreg, ModelKind::svm, ModelKind::forest,
                    ModelKind::cnn, ModelKind::lstm, ModelKind::gru}) {
    CAPTURE(to_string(kind));
    auto pipeline = train_pipeline(quick_config(kind), VerbLexicon::builtin(), ds);
    auto bytes = save_model(*pipeline);
    auto restored = load_model(bytes);
    CHECK(restored->predict(probe) == pipeline->predict(probe));
    CHECK(restored->predict(ds) == pipeline->predict(ds));
    // bit-stable re-serialization
    CHECK(save_model(*restored) == bytes);
  }
}

TEST_CASE("artifact: corrupt and foreign inputs are refused cleanly") {
  auto ds = load_olid_tsv(data_path("fixture_a.tsv"), Task::A);
  auto pipeline =
      train_pipeline(quick_config(ModelKind::logreg), VerbLexicon::builtin(), ds);
  auto bytes = save_model(*pipeline);

  SUBCASE("bad magic") {
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(load_model(bad), ParseError);
  }
  SUBCASE("newer format version is refused with a message") {
    auto bad = bytes;
    bad[4] = 99;
    CHECK_THROWS_WITH_AS(load_model(bad), doctest::Contains("newer"), ParseError);
  }
  SUBCASE("corrupted section length") {
    auto bad = bytes;
    // first section header sits after magic+version+count; its u64 length
    // starts at offset 12 + 4 + strlen("config")
    std::size_t len_offset = 12 + 4 + 6;
    bad[len_offset] = 0xFF;
    bad[len_offset + 1] = 0xFF;
    bad[len_offset + 2] = 0xFF;
    CHECK_THROWS_AS(load_model(bad), ParseError);
  }
  SUBCASE("truncated file") {
    auto bad = bytes;
    bad.resize(bad.size() / 2);
    CHECK_THROWS_AS(load_model(bad), ParseError);
  }
  SUBCASE("empty file") {
    CHECK_THROWS_AS(load_model({}), ParseError);
  }
}

TEST_CASE("artifact file i/o is atomic") {
  auto ds = load_olid_tsv(data_path("fixture_a.tsv"), Task::A);
  auto pipeline =
      train_pipeline(quick_config(ModelKind::logreg), VerbLexicon::builtin(), ds);
  const std::string path = "artifact_test.ofns";
  save_model_file(*pipeline, path);
  CHECK(std::filesystem::exists(path));
  CHECK(!std::filesystem::exists(path + ".tmp"));
  auto restored = load_model_file(path);
  CHECK(restored->predict(ds) == pipeline->predict(ds));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_model_file(path), ParseError);
}

TEST_CASE("cv with augmentation fails cleanly when a fold loses the minority") {
  // a single UNT example lands in exactly one fold; when that fold is held
  // out, the training folds have no minority left and the failure must name
  // the fold
  Dataset ds;
  ds.task = Task::B;
  for (int i = 0; i < 8; ++i)
    ds.examples.push_back({"t" + std::to_string(i), "you utter disgrace",
                           "OFF", "TIN", {}});
  ds.examples.push_back({"u0", "damn everything", "OFF", "UNT", {}});

  auto config = quick_config(ModelKind::logreg, Task::B);
  config.augment.enabled = true;
  auto trainer = make_trainer(config, VerbLexicon::builtin());
  CHECK_THROWS_WITH_AS(cross_validate(*trainer, ds, 3, 1),
                       doctest::Contains("fold"), TrainingError);
}

TEST_CASE("pipeline trainer works under cross-validation end to end") {
  auto ds = load_olid_tsv(data_path("fixture50_a.tsv"), Task::A);
  auto config = quick_config(ModelKind::logreg);
  auto trainer = make_trainer(config, VerbLexicon::builtin());
  auto report = cross_validate(*trainer, ds, 5, 4);
  REQUIRE(report.per_fold.size() == 5);
  for (const auto& fold : report.per_fold) CHECK(fold.n == 10);
  // the fixture is trivially separable by word choice
  CHECK(report.mean_accuracy > 0.7);
}
