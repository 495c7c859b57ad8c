#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "vocabtrend/cooccurrence.hpp"
#include "vocabtrend/corpus.hpp"
#include "vocabtrend/error.hpp"
#include "vocabtrend/evaluation.hpp"
#include "vocabtrend/forecast.hpp"
#include "vocabtrend/lexicon.hpp"
#include "vocabtrend/neuralnet.hpp"
#include "vocabtrend/pipeline.hpp"
#include "vocabtrend/synthetic.hpp"

namespace py = pybind11;
using namespace vocabtrend;

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

RunConfig config_with(const std::filesystem::path& file, const Overrides& overrides) {
  RunConfig c = load_config(file);
  for (const auto& [k, v] : overrides) c.set(k, v);
  return c;
}

template <typename F>
std::string logged(F&& f) {
  std::ostringstream log;
  f(log);
  return log.str();
}

Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> counts_of(
    const FrequencyMatrix& m) {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(
      m.word_count(), m.year_count());
  for (std::size_t w = 0; w < m.word_count(); ++w) {
    for (std::size_t y = 0; y < m.year_count(); ++y) {
      out(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(y)) = m.at(w, y);
    }
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(vocabtrend, mod) {
  mod.doc() = "Exam vocabulary trend mining and next-year forecasting.";

  py::register_exception<InputError>(mod, "InputError", PyExc_ValueError);
  py::register_exception<NumericError>(mod, "NumericError", PyExc_ArithmeticError);

  // corpus
  mod.def("default_removal_patterns", [] { return RemovalRuleSet::defaults().literal_patterns; });
  mod.def(
      "clean_text",
      [](const std::string& text, std::optional<std::vector<std::string>> patterns) {
        RemovalRuleSet rules =
            patterns ? RemovalRuleSet{*patterns} : RemovalRuleSet::defaults();
        return clean_text(text, rules);
      },
      py::arg("text"), py::arg("patterns") = py::none());
  mod.def("tokenize", &tokenize, py::arg("cleaned"));
  mod.def("extract_sentences", &extract_sentences, py::arg("cleaned"));

  py::class_<YearDocument>(mod, "YearDocument")
      .def_readonly("year", &YearDocument::year)
      .def_readonly("tokens", &YearDocument::tokens)
      .def_readonly("sentences", &YearDocument::sentences);
  mod.def(
      "make_document",
      [](int year, const std::string& text) {
        return make_document(year, text, RemovalRuleSet::defaults());
      },
      py::arg("year"), py::arg("text"));
  mod.def(
      "load_corpus",
      [](const std::filesystem::path& dir) { return load_corpus(dir, RemovalRuleSet::defaults()); },
      py::arg("directory"));

  // lexicon
  py::class_<LemmaMap>(mod, "LemmaMap")
      .def(py::init<>())
      .def(py::init<std::unordered_map<std::string, std::string>>(), py::arg("entries"))
      .def("lemmatize", &LemmaMap::lemmatize, py::arg("token"))
      .def("__len__", &LemmaMap::size);
  mod.def("load_lemma_map", &load_lemma_map, py::arg("path"));

  py::class_<FrequencyMatrix>(mod, "FrequencyMatrix")
      .def(py::init([](std::vector<std::string> words, std::vector<int> years,
                       const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>& counts) {
             if (static_cast<std::size_t>(counts.rows()) != words.size() ||
                 static_cast<std::size_t>(counts.cols()) != years.size()) {
               throw InputError("counts must be words x years");
             }
             return FrequencyMatrix(std::move(words), std::move(years),
                                    std::vector<FrequencyMatrix::Count>(
                                        counts.data(), counts.data() + counts.size()));
           }),
           py::arg("words"), py::arg("years"), py::arg("counts"))
      .def_property_readonly("words", &FrequencyMatrix::words)
      .def_property_readonly("years", &FrequencyMatrix::years)
      .def_property_readonly("counts", &counts_of)
      .def("row_total", &FrequencyMatrix::row_total, py::arg("word"))
      .def("__eq__", [](const FrequencyMatrix& a, const FrequencyMatrix& b) { return a == b; });
  mod.def(
      "build_frequency_matrix",
      [](const std::vector<YearDocument>& docs, const LemmaMap& map) {
        return build_frequency_matrix(docs, map);
      },
      py::arg("documents"), py::arg("lemma_map") = LemmaMap{});
  mod.def(
      "apply_screening",
      [](const FrequencyMatrix& m, std::set<std::string> kept) {
        return apply_screening(m, ScreenList{std::move(kept)});
      },
      py::arg("matrix"), py::arg("kept"));
  mod.def(
      "rank_split",
      [](const FrequencyMatrix& m, std::size_t k) {
        auto split = rank_split(m, k);
        return py::make_tuple(split.high, split.low);
      },
      py::arg("matrix"), py::arg("k"));
  mod.def(
      "diff_vocabularies",
      [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        const auto d = diff_vocabularies(a, b);
        py::dict out;
        out["only_a"] = d.only_a;
        out["only_b"] = d.only_b;
        out["both"] = d.both;
        return out;
      },
      py::arg("a"), py::arg("b"));

  // cooccurrence
  mod.def(
      "correlation_matrix",
      [](const std::vector<Sentence>& sentences, const std::vector<std::string>& vocab,
         const LemmaMap& map) {
        const auto c = correlation_matrix(occurrence_matrix(sentences, vocab, map));
        const auto n = static_cast<Eigen::Index>(c.words.size());
        return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(c.values.data(), n, n)
            .eval();
      },
      py::arg("sentences"), py::arg("vocab"), py::arg("lemma_map") = LemmaMap{});

  // neuralnet
  py::class_<Hyperparams>(mod, "Hyperparams")
      .def(py::init<>())
      .def_readwrite("hidden", &Hyperparams::hidden)
      .def_readwrite("dense1", &Hyperparams::dense1)
      .def_readwrite("dense2", &Hyperparams::dense2)
      .def_readwrite("dropout", &Hyperparams::dropout)
      .def_readwrite("learning_rate", &Hyperparams::learning_rate)
      .def_readwrite("beta1", &Hyperparams::beta1)
      .def_readwrite("beta2", &Hyperparams::beta2)
      .def_readwrite("epsilon", &Hyperparams::epsilon)
      .def_readwrite("epochs", &Hyperparams::epochs)
      .def_readwrite("batch_size", &Hyperparams::batch_size)
      .def_readwrite("seed", &Hyperparams::seed)
      .def("validate", &Hyperparams::validate);

  py::class_<ModelParams>(mod, "ModelParams")
      .def(py::init<std::size_t, std::size_t, std::size_t>(), py::arg("hidden"),
           py::arg("dense1"), py::arg("dense2"))
      .def_property_readonly("hidden", &ModelParams::hidden)
      .def_property_readonly("dense1", &ModelParams::dense1)
      .def_property_readonly("dense2", &ModelParams::dense2)
      .def_property(
          "values",
          [](const ModelParams& p) {
            const auto v = p.values();
            return std::vector<double>(v.begin(), v.end());
          },
          [](ModelParams& p, const std::vector<double>& v) {
            if (v.size() != p.size()) throw InputError("parameter count mismatch");
            std::copy(v.begin(), v.end(), p.values().begin());
          })
      .def("__len__", &ModelParams::size)
      .def("__eq__", [](const ModelParams& a, const ModelParams& b) { return a == b; });

  mod.def(
      "initialize_params",
      [](const Hyperparams& hyper) {
        Rng rng(hyper.seed);
        return initialize_params(hyper, rng);
      },
      py::arg("hyper"));
  mod.def("predict", &predict, py::arg("params"), py::arg("batch"));
  mod.def("logcosh", &logcosh, py::arg("x"));
  mod.def(
      "logcosh_loss",
      [](const std::vector<double>& pred, const std::vector<double>& target) {
        return logcosh_loss(pred, target);
      },
      py::arg("pred"), py::arg("target"));
  mod.def(
      "grad_check",
      [](const ModelParams& p, const Eigen::MatrixXd& batch, const std::vector<double>& target,
         double epsilon) { return grad_check(p, batch, target, epsilon); },
      py::arg("params"), py::arg("batch"), py::arg("target"), py::arg("epsilon") = 1e-5);
  mod.def("save_checkpoint",
          [](const std::filesystem::path& file, const ModelParams& p, const Hyperparams& h,
             std::size_t window) {
            save_checkpoint(file, Checkpoint{h, window, p, AdamState::zeros_like(p)});
          },
          py::arg("path"), py::arg("params"), py::arg("hyper"), py::arg("window"));
  mod.def(
      "load_checkpoint",
      [](const std::filesystem::path& file) {
        auto c = load_checkpoint(file);
        return py::make_tuple(c.params, c.hyper, c.window);
      },
      py::arg("path"));

  // forecast
  py::class_<WindowSet>(mod, "WindowSet")
      .def_readonly("window", &WindowSet::window)
      .def_readonly("word_index", &WindowSet::word_index)
      .def_readonly("start", &WindowSet::start)
      .def_readonly("inputs", &WindowSet::inputs)
      .def_readonly("targets", &WindowSet::targets)
      .def("__len__", &WindowSet::size);
  mod.def("build_windows", &build_windows, py::arg("matrix"), py::arg("window"));
  mod.def(
      "train_model",
      [](const WindowSet& ws, const Hyperparams& hyper) {
        py::gil_scoped_release release;
        auto r = train_model(ws, hyper);
        return std::make_pair(r.params, r.epoch_loss);
      },
      py::arg("windows"), py::arg("hyper"));
  mod.def("predict_next", &predict_next, py::arg("params"), py::arg("matrix"), py::arg("window"));

  py::class_<EnsembleSpec>(mod, "EnsembleSpec")
      .def(py::init([](const std::vector<std::pair<std::size_t, double>>& entries) {
             EnsembleSpec s;
             for (const auto& [n, w] : entries) s.entries.push_back({n, w});
             s.validate();
             return s;
           }),
           py::arg("entries"))
      .def_static("defaults", &EnsembleSpec::defaults)
      .def_property_readonly("entries", [](const EnsembleSpec& s) {
        std::vector<std::pair<std::size_t, double>> out;
        for (const auto& e : s.entries) out.emplace_back(e.window, e.weight);
        return out;
      });

  py::class_<AiScoreTable>(mod, "AiScoreTable")
      .def_readonly("words", &AiScoreTable::words)
      .def_readonly("windows", &AiScoreTable::windows)
      .def_readonly("per_window", &AiScoreTable::per_window)
      .def_readonly("raw", &AiScoreTable::raw)
      .def_readonly("score", &AiScoreTable::score)
      .def("__len__", &AiScoreTable::size);
  mod.def(
      "ai_score",
      [](const std::vector<std::string>& words, const std::vector<std::vector<double>>& per_window,
         const EnsembleSpec& spec) { return ai_score(words, per_window, spec); },
      py::arg("words"), py::arg("per_window"), py::arg("spec"));
  mod.def(
      "run_ensemble",
      [](const FrequencyMatrix& m, const EnsembleSpec& spec, const Hyperparams& hyper,
         std::size_t jobs) {
        py::gil_scoped_release release;
        return run_ensemble(m, spec, hyper, jobs).scores;
      },
      py::arg("matrix"), py::arg("spec"), py::arg("hyper"), py::arg("jobs") = 0);

  // evaluation
  py::class_<PredictionMetrics>(mod, "PredictionMetrics")
      .def_readonly("interest_count", &PredictionMetrics::interest_count)
      .def_readonly("actual_count", &PredictionMetrics::actual_count)
      .def_readonly("true_positives", &PredictionMetrics::true_positives)
      .def_readonly("accuracy", &PredictionMetrics::accuracy)
      .def_readonly("intersection", &PredictionMetrics::intersection);
  mod.def("prediction_metrics", &prediction_metrics, py::arg("interest"), py::arg("actual"));
  mod.def("extract_exam_vocab", &extract_exam_vocab, py::arg("exam"),
          py::arg("lemma_map") = LemmaMap{});

  py::class_<Segment>(mod, "Segment")
      .def_readonly("lower", &Segment::lower)
      .def_readonly("upper", &Segment::upper)
      .def_readonly("words", &Segment::words)
      .def_readonly("appeared", &Segment::appeared)
      .def_readonly("rate", &Segment::rate)
      .def_readonly("accumulated_rate", &Segment::accumulated_rate)
      .def_readonly("empty", &Segment::empty);
  mod.def("segment_analysis", &segment_analysis, py::arg("scores"), py::arg("actual"),
          py::arg("width") = 10);

  py::class_<HistogramBin>(mod, "HistogramBin")
      .def_readonly("lower", &HistogramBin::lower)
      .def_readonly("upper", &HistogramBin::upper)
      .def_readonly("count", &HistogramBin::count);
  mod.def("score_histogram", &score_histogram, py::arg("scores"), py::arg("bin_width") = 10.0);

  // fixtures and pipeline
  mod.def(
      "write_synthetic_corpus",
      [](const std::filesystem::path& dir, std::size_t years, std::uint64_t seed) {
        SyntheticOptions o;
        o.years = years;
        o.seed = seed;
        const auto c = make_synthetic_corpus(o);
        write_synthetic_corpus(c, dir);
        py::dict out;
        out["persistent"] = c.persistent;
        out["extinct"] = c.extinct;
        out["noise"] = c.noise;
        out["exam_year"] = c.exam_year;
        return out;
      },
      py::arg("directory"), py::arg("years") = 12, py::arg("seed") = 2022);

  mod.def(
      "ingest",
      [](const std::filesystem::path& config, const Overrides& set) {
        const auto c = config_with(config, set);
        return logged([&](std::ostream& log) { cmd_ingest(c, log); });
      },
      py::arg("config"), py::arg("set") = Overrides{});
  mod.def(
      "correlate",
      [](const std::filesystem::path& config, const Overrides& set) {
        const auto c = config_with(config, set);
        return logged([&](std::ostream& log) { cmd_correlate(c, log); });
      },
      py::arg("config"), py::arg("set") = Overrides{});
  mod.def(
      "train",
      [](const std::filesystem::path& config, const Overrides& set) {
        const auto c = config_with(config, set);
        py::gil_scoped_release release;
        return logged([&](std::ostream& log) { cmd_train_predict(c, log); });
      },
      py::arg("config"), py::arg("set") = Overrides{});
  mod.def(
      "evaluate",
      [](const std::filesystem::path& config, const std::filesystem::path& exam,
         const Overrides& set) {
        const auto c = config_with(config, set);
        return logged([&](std::ostream& log) { cmd_evaluate(c, exam, log); });
      },
      py::arg("config"), py::arg("exam"), py::arg("set") = Overrides{});
  mod.def(
      "report",
      [](const std::filesystem::path& config, const Overrides& set) {
        const auto c = config_with(config, set);
        return logged([&](std::ostream& log) { cmd_report(c, log); });
      },
      py::arg("config"), py::arg("set") = Overrides{});
}
