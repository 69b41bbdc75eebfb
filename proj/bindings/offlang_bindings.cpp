#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "offlang/corpus.hpp"
#include "offlang/errors.hpp"
#include "offlang/evaluation.hpp"
#include "offlang/features.hpp"
#include "offlang/model_io.hpp"
#include "offlang/neural.hpp"
#include "offlang/pipeline.hpp"
#include "offlang/preprocess.hpp"

namespace py = pybind11;
using namespace offlang;

namespace {

RunConfig config_from_dict(const py::dict& d) {
  RunConfig config;
  for (auto item : d) {
    std::string key = py::cast<std::string>(item.first);
    std::string value = py::cast<std::string>(py::str(item.second));
    if (key == "task") config.task = task_from_string(value);
    else if (key == "model") config.model = model_kind_from_string(value);
    else if (key == "preprocess")
      config.preprocess_mode = reduce_mode_from_string(value);
    else if (key == "seed") config.seed = std::stoull(value);
    else if (key == "augment") config.augment.enabled = (value == "true" || value == "True" || value == "1");
    else if (key == "target_ratio") config.augment.target_ratio = std::stod(value);
    else if (key == "drop_hashtag_body")
      config.drop_hashtag_body = (value == "true" || value == "True" || value == "1");
    else config.hyper.set(key, value);
  }
  validate_hyper(config.model, config.hyper);
  return config;
}

Dataset dataset_from_rows(
    const std::string& task_name,
    const std::vector<std::tuple<std::string, std::string, std::string>>& rows) {
  Dataset ds;
  ds.task = task_from_string(task_name);
  for (const auto& [id, text, label] : rows) {
    Example ex;
    ex.id = id;
    ex.raw_text = text;
    switch (ds.task) {
      case Task::A:
        ex.label_a = label;
        break;
      case Task::B:
        ex.label_a = "OFF";
        ex.label_b = label;
        break;
      case Task::C:
        ex.label_a = "OFF";
        ex.label_b = "TIN";
        ex.label_c = label;
        break;
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

py::dict cv_report_to_dict(const CvReport& report) {
  py::dict out;
  py::list folds;
  for (const auto& fold : report.per_fold) {
    py::dict f;
    f["macro_f1"] = fold.macro_f1;
    f["accuracy"] = fold.accuracy;
    f["n"] = fold.n;
    folds.append(f);
  }
  out["folds"] = folds;
  out["mean_macro_f1"] = report.mean_macro_f1;
  out["mean_accuracy"] = report.mean_accuracy;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "offensive-language tweet classification pipeline";

  py::register_exception<Error>(m, "OfflangError", PyExc_ValueError);

  // preprocessing
  m.def("clean", &clean, py::arg("raw"), py::arg("drop_hashtag_body") = false);
  m.def("tokenize", [](const std::string& s) { return tokenize(s); });
  m.def("porter_stem", [](const std::string& w) { return porter_stem(w); });
  m.def("lemmatize_verb", [](const std::string& w) {
    return lemmatize_verb(w, VerbLexicon::builtin());
  });
  m.def(
      "preprocess_text",
      [](const std::string& raw, const std::string& mode, bool drop_hashtag_body) {
        return preprocess_text(raw, reduce_mode_from_string(mode),
                               VerbLexicon::builtin(), drop_hashtag_body);
      },
      py::arg("raw"), py::arg("mode") = "none",
      py::arg("drop_hashtag_body") = false);

  py::class_<Vocabulary>(m, "Vocabulary")
      .def_property_readonly("size", &Vocabulary::size)
      .def("contains", &Vocabulary::contains)
      .def("index_of", &Vocabulary::index_of);
  m.def("build_vocabulary", &build_vocabulary);

  py::class_<IndexSequence>(m, "IndexSequence")
      .def_readonly("indices", &IndexSequence::indices)
      .def_readonly("true_length", &IndexSequence::true_length);
  m.def("encode_padded", &encode_padded, py::arg("tokens"), py::arg("vocab"),
        py::arg("max_len"));
  m.def("max_corpus_length", &max_corpus_length);

  // features
  py::class_<TfidfModel>(m, "TfidfModel")
      .def_readonly("terms", &TfidfModel::terms)
      .def_readonly("df", &TfidfModel::df)
      .def_readonly("idf", &TfidfModel::idf)
      .def_readonly("n_docs", &TfidfModel::n_docs)
      .def("transform", [](const TfidfModel& model,
                           const std::vector<std::string>& tokens) {
        return transform_tfidf(model, tokens).pairs;
      });
  m.def("fit_tfidf", &fit_tfidf);

  // corpus
  py::class_<Example>(m, "Example")
      .def_readonly("id", &Example::id)
      .def_readonly("raw_text", &Example::raw_text)
      .def_readonly("label_a", &Example::label_a)
      .def_readonly("label_b", &Example::label_b)
      .def_readonly("label_c", &Example::label_c);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("examples", &Dataset::examples)
      .def_property_readonly("task",
                             [](const Dataset& ds) { return to_string(ds.task); })
      .def("labels",
           [](const Dataset& ds) {
             std::vector<std::string> out;
             for (std::size_t i = 0; i < ds.size(); ++i)
               out.push_back(ds.label_of(i));
             return out;
           })
      .def("__len__", &Dataset::size);

  m.def("load_olid_tsv", [](const std::string& path, const std::string& task) {
    return load_olid_tsv(path, task_from_string(task));
  });
  m.def("make_dataset", &dataset_from_rows, py::arg("task"), py::arg("rows"),
        "build a dataset from (id, text, label) tuples");
  m.def("split_holdout", &split_holdout, py::arg("ds"), py::arg("train_fraction"),
        py::arg("seed"));
  m.def(
      "make_folds",
      [](const Dataset& ds, int k, std::uint64_t seed) {
        return make_folds(ds, k, seed).assignments;
      },
      py::arg("ds"), py::arg("k"), py::arg("seed"));
  m.def("augment_minority", &augment_minority, py::arg("ds"),
        py::arg("target_ratio"), py::arg("seed"));
  m.def("task_classes", [](const std::string& task) {
    return task_classes(task_from_string(task));
  });

  // metrics
  m.def(
      "macro_f1_score",
      [](const std::vector<std::string>& y_true,
         const std::vector<std::string>& y_pred,
         const std::vector<std::string>& classes) {
        return macro_f1(confusion(y_true, y_pred, classes));
      },
      py::arg("y_true"), py::arg("y_pred"), py::arg("classes"));
  m.def("accuracy_score", &accuracy, py::arg("y_true"), py::arg("y_pred"));

  // training pipeline
  py::class_<TrainedPipeline>(m, "Pipeline")
      .def("predict",
           [](const TrainedPipeline& p, const std::vector<std::string>& texts) {
             return p.predict_texts(texts);
           })
      .def("predict_dataset",
           [](const TrainedPipeline& p, const Dataset& ds) { return p.predict(ds); })
      .def("save", [](const TrainedPipeline& p,
                      const std::string& path) { save_model_file(p, path); })
      .def_property_readonly("classes",
                             [](const TrainedPipeline& p) { return p.classes; })
      .def_property_readonly(
          "train_accuracy",
          [](const TrainedPipeline& p) { return p.train_accuracy; });

  m.def(
      "train",
      [](const Dataset& ds, const py::dict& config) {
        return train_pipeline(config_from_dict(config), VerbLexicon::builtin(), ds);
      },
      py::arg("ds"), py::arg("config"));
  m.def("load_pipeline",
        [](const std::string& path) { return load_model_file(path); });
  m.def(
      "cross_validate",
      [](const Dataset& ds, const py::dict& config, int k) {
        RunConfig rc = config_from_dict(config);
        auto trainer = make_trainer(rc, VerbLexicon::builtin());
        return cv_report_to_dict(cross_validate(*trainer, ds, k, rc.seed));
      },
      py::arg("ds"), py::arg("config"), py::arg("k") = 5);

  m.def(
      "grad_check",
      [](const std::string& kind, std::uint64_t seed) {
        return grad_check(neural_kind_from_string(kind), GradCheckConfig{}, seed);
      },
      py::arg("kind"), py::arg("seed") = 0);
}
