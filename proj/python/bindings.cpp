#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "spamfilter/config.hpp"
#include "spamfilter/corpus.hpp"
#include "spamfilter/driftloop.hpp"
#include "spamfilter/error.hpp"
#include "spamfilter/experiment.hpp"
#include "spamfilter/features.hpp"
#include "spamfilter/metrics.hpp"
#include "spamfilter/selectors.hpp"
#include "spamfilter/svm.hpp"

namespace py = pybind11;
using namespace spamfilter;

namespace {

using Entries = std::vector<std::pair<std::string, std::string>>;

Entries to_entries(const py::dict& d) {
  Entries out;
  for (const auto& [k, v] : d) out.emplace_back(py::str(k), py::str(v));
  return out;
}

py::dict metrics_dict(const MetricsReport& m) {
  py::dict d;
  d["accuracy"] = m.accuracy;
  d["fpr"] = m.fpr ? py::cast(*m.fpr) : py::none();
  d["fnr"] = m.fnr ? py::cast(*m.fnr) : py::none();
  d["micro_f1"] = m.micro_f1;
  d["macro_f1"] = m.macro_f1;
  d["mcc"] = m.mcc;
  return d;
}

py::list scored(const FeatureSet& fs) {
  py::list out;
  for (const auto& f : fs.features()) out.append(py::make_tuple(f.term, f.weight));
  return out;
}

py::dict experiment_dict(const ExperimentOutput& out) {
  py::dict d;
  d["csv"] = out.table.to_csv();
  d["json"] = out.table.to_json();
  py::list sessions;
  for (const auto& r : out.runs) sessions.append(r.report.to_json());
  d["sessions"] = sessions;
  return d;
}

}  // namespace

PYBIND11_MODULE(_spamfilter, m) {
  m.doc() = "TFDCR feature selection and drift-adaptive SVM spam filtering";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::exception<Error>(m, "SpamfilterError", PyExc_RuntimeError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error_type.get_stored().ptr(), (std::string(e.kind()) + ": " + e.what()).c_str());
    }
  });

  py::enum_<Label>(m, "Label")
      .value("Spam", Label::Spam)
      .value("Legitimate", Label::Legitimate)
      .value("Unlabeled", Label::Unlabeled);

  py::class_<Document>(m, "Document")
      .def(py::init<std::string, Label, std::vector<std::string>, std::size_t>(), py::arg("id"), py::arg("label"),
           py::arg("tokens"), py::arg("arrival_index") = 0)
      .def_readwrite("id", &Document::id)
      .def_readwrite("label", &Document::label)
      .def_readwrite("tokens", &Document::tokens)
      .def_readwrite("arrival_index", &Document::arrival_index)
      .def("__repr__", [](const Document& d) {
        return "<Document " + d.id + " " + std::string(to_string(d.label)) + " " + std::to_string(d.tokens.size()) +
               " tokens>";
      });

  m.def("tokenize", &tokenize, py::arg("text"));
  m.def("stem", &stem, py::arg("token"));
  m.def("preprocess", [](std::string_view text) { return preprocess(text); }, py::arg("text"));

  m.def(
      "synth_drift",
      [](std::uint64_t seed, std::size_t n_docs, std::size_t drift_point, double overlap) {
        SynthParams p;
        p.n_docs = n_docs;
        p.drift_point = drift_point;
        p.overlap = overlap;
        return synth_drift(seed, p).documents();
      },
      py::arg("seed"), py::arg("n_docs") = 2000, py::arg("drift_point") = 1000, py::arg("overlap") = 0.2);

  m.def(
      "tfdcr_weight",
      [](std::size_t tf_s, std::size_t tf_l, std::size_t df_s, std::size_t df_l, std::size_t n_spam,
         std::size_t n_legit) { return tfdcr_weight({"", tf_s, tf_l, df_s, df_l}, n_spam, n_legit); },
      py::arg("tf_spam"), py::arg("tf_legit"), py::arg("df_spam"), py::arg("df_legit"), py::arg("n_spam"),
      py::arg("n_legit"));

  m.def(
      "select_features",
      [](const std::vector<Document>& docs, std::size_t n, const std::string& selector) {
        return scored(select_features(parse_selector(selector), count_stats(LabeledCorpus(docs)), n));
      },
      py::arg("documents"), py::arg("n"), py::arg("selector") = "tfdcr",
      "Top-n (term, weight) pairs of the documents under a selector.");

  m.def(
      "classify",
      [](const std::vector<Document>& training, const std::vector<Document>& test, std::size_t n, double c) {
        DriftConfig cfg;
        cfg.feature_dim = n;
        cfg.train.c = c;
        const auto state = run_batch_phase(LabeledCorpus(training), cfg);
        std::vector<double> scores;
        for (const auto& d : test) scores.push_back(predict(state.model, vectorize(d, state.features)).score);
        return scores;
      },
      py::arg("training"), py::arg("test"), py::arg("n") = 500, py::arg("c") = 1.0,
      "Train on `training` and return the decision value of each test document.");

  m.def(
      "evaluate",
      [](std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn) {
        return metrics_dict(evaluate({tp, tn, fp, fn}));
      },
      py::arg("tp"), py::arg("tn"), py::arg("fp"), py::arg("fn"));

  m.def(
      "config_dump",
      [](const py::dict& settings) { return dump_config(parse_config(to_entries(settings))); },
      py::arg("settings"), "Validated `key = value` dump of a settings mapping.");

  m.def(
      "run_experiment",
      [](const py::dict& settings) {
        const RunConfig cfg = parse_config(to_entries(settings));
        ExperimentOutput out;
        {
          py::gil_scoped_release release;
          out = cfg.mode == SessionMode::Batch ? run_experiment1(cfg) : run_experiment2(cfg);
        }
        return experiment_dict(out);
      },
      py::arg("settings"),
      "Run experiment 1 (mode=batch) or 2 (mode=incremental). Returns the table as csv and json plus every "
      "session report.");
}
