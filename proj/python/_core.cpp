#include "sentilag/config.hpp"
#include "sentilag/error.hpp"
#include "sentilag/eval.hpp"
#include "sentilag/grouping.hpp"
#include "sentilag/lagsearch.hpp"
#include "sentilag/lstm.hpp"
#include "sentilag/pipeline.hpp"
#include "sentilag/sentiment.hpp"
#include "sentilag/stages.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

namespace py = pybind11;
using namespace sentilag;
using nlohmann::json;

namespace {

// Reports cross the boundary as JSON text; the Python side decodes them.
std::string dump(const json& j) { return j.dump(); }

sentiment::DailySentimentSeries to_series(const std::map<std::string, std::pair<double, std::int64_t>>& in) {
  sentiment::DailySentimentSeries s;
  for (const auto& [date, entry] : in) {
    s[Date::parse(date)] = {entry.first, entry.second};
  }
  return s;
}

py::dict metrics_dict(const eval::ConfusionMatrix& m) {
  const auto r = eval::metrics(m);
  py::dict d;
  d["tp"] = m.tp;
  d["fn"] = m.fn;
  d["fp"] = m.fp;
  d["tn"] = m.tn;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["accuracy"] = r.accuracy;
  d["precision_undefined"] = r.precision_undefined;
  d["recall_undefined"] = r.recall_undefined;
  d["f1_undefined"] = r.f1_undefined;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sentiment lead-lag forecasting core";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error;
  error.call_once_and_store_result(
      [&] { return py::exception<Error>(m, "SentilagError", PyExc_ValueError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const StageError& e) {
      PyErr_SetObject(error.get_stored().ptr(), py::make_tuple(e.what(), e.exit_code()).ptr());
    } catch (const Error& e) {
      py::set_error(error.get_stored(), e.what());
    }
  });

  m.attr("DECISION_THRESHOLD") = sentiment::kDecisionThreshold;

  // statistics
  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return lagsearch::pearson(x, y); },
        py::arg("x"), py::arg("y"));
  m.def("mse", [](const std::vector<double>& p, const std::vector<double>& a) { return eval::mse(p, a); },
        py::arg("pred"), py::arg("actual"));
  m.def("day_value", &sentiment::day_value, py::arg("labels"), "Mean of 0/1 labels for one day");

  m.def(
      "confusion",
      [](const std::vector<bool>& pred, const std::vector<bool>& actual) {
        const auto p = std::make_unique<bool[]>(pred.size());
        const auto a = std::make_unique<bool[]>(actual.size());
        std::copy(pred.begin(), pred.end(), p.get());
        std::copy(actual.begin(), actual.end(), a.get());
        return metrics_dict(eval::confusion(std::span<const bool>(p.get(), pred.size()),
                                            std::span<const bool>(a.get(), actual.size())));
      },
      py::arg("pred_positive"), py::arg("actual_positive"));
  m.def(
      "metrics", [](long tp, long fn, long fp, long tn) { return metrics_dict({tp, fn, fp, tn}); }, py::arg("tp"),
      py::arg("fn"), py::arg("fp"), py::arg("tn"));

  // grouping
  m.def("default_keywords", &grouping::default_keywords);
  m.def(
      "classify_user",
      [](bool certified, const std::string& description, const std::vector<std::string>& keywords) {
        return std::string(grouping::to_string(grouping::classify_user({"", certified, description}, keywords)));
      },
      py::arg("certified"), py::arg("description"), py::arg("keywords"));

  // sentiment classifier
  py::class_<sentiment::SentimentModel>(m, "SentimentModel")
      .def_static(
          "load", [](const std::filesystem::path& p) { return sentiment::load_model(p); }, py::arg("path"))
      .def(
          "save", [](const sentiment::SentimentModel& s, const std::filesystem::path& p) { sentiment::save_model(p, s); },
          py::arg("path"))
      .def(
          "score",
          [](const sentiment::SentimentModel& s, const std::string& text) {
            const auto l = sentiment::score(s, text);
            return py::make_tuple(l.label, l.probability);
          },
          py::arg("text"), "Returns (label, probability)")
      .def_readonly("bias", &sentiment::SentimentModel::bias)
      .def_property_readonly("hash_dims", [](const sentiment::SentimentModel& s) { return s.features.hash_dims; });

  m.def(
      "featurize",
      [](const std::string& text, std::uint32_t hash_dims, const std::set<int>& orders) {
        const auto v = sentiment::featurize(text, {hash_dims, orders});
        return py::make_tuple(v.index, v.value);
      },
      py::arg("text"), py::arg("hash_dims") = sentiment::kDefaultHashDims, py::arg("ngram_orders") = std::set<int>{1, 2});
  m.def(
      "train_classifier",
      [](const std::vector<std::string>& texts, const std::vector<int>& labels, double lr, int epochs, double l2,
         std::uint32_t hash_dims) {
        if (texts.size() != labels.size()) {
          throw DomainError("texts and labels differ in length");
        }
        std::vector<sentiment::LabeledText> corpus;
        for (std::size_t i = 0; i < texts.size(); ++i) {
          corpus.push_back({texts[i], labels[i]});
        }
        sentiment::FeatureConfig cfg;
        cfg.hash_dims = hash_dims;
        auto r = sentiment::train_classifier(corpus, {lr, epochs, l2}, cfg);
        return py::make_tuple(std::move(r.model), r.loss_history);
      },
      py::arg("texts"), py::arg("labels"), py::arg("learning_rate") = 1.0, py::arg("epochs") = 200,
      py::arg("l2") = 1e-6, py::arg("hash_dims") = sentiment::kDefaultHashDims,
      "Returns (model, loss_history)");
  m.def(
      "ingest_labels",
      [](const std::filesystem::path& p) {
        std::vector<py::tuple> out;
        for (const auto& l : sentiment::ingest_labels(p)) {
          out.push_back(py::make_tuple(l.post_id, l.label, l.probability));
        }
        return out;
      },
      py::arg("path"), "Validated (post_id, label, probability) records");

  // lag search over a {date: (value, posts)} series and a stock CSV
  m.def(
      "search_lag",
      [](const std::map<std::string, std::pair<double, std::int64_t>>& series, const std::filesystem::path& stock,
         int tmin, int tmax, const std::string& target, const std::string& fill, bool use_abs) {
        lagsearch::LagSearchOptions o;
        o.t_min = tmin;
        o.t_max = tmax;
        o.target = lagsearch::parse_target(target);
        o.fill = lagsearch::parse_fill(fill);
        o.use_abs = use_abs;
        const auto r = lagsearch::search_lag(to_series(series), ingest::load_stock_bars(stock), o);
        py::dict d;
        d["best_T"] = r.best_T;
        d["best_r"] = r.best_r;
        d["correlations"] = r.correlations;
        d["pairs"] = r.pairs;
        d["skipped"] = r.skipped;
        return d;
      },
      py::arg("sentiment"), py::arg("stock_csv"), py::arg("tmin") = 3, py::arg("tmax") = 30,
      py::arg("target") = "change_pct", py::arg("fill") = "neutral", py::arg("use_abs") = false);

  // LSTM on caller-supplied aligned rows
  m.def(
      "train_lstm",
      [](const std::vector<double>& opens, const std::vector<double>& sentiments, int lookback, int epochs, int hidden,
         int batch_size, double learning_rate, std::uint64_t seed, double split) {
        if (opens.size() != sentiments.size()) {
          throw DomainError("opens and sentiments differ in length");
        }
        std::vector<lstm::SequenceRow> rows;
        for (std::size_t i = 0; i < opens.size(); ++i) {
          rows.push_back({Date{static_cast<std::int32_t>(i)}, opens[i], sentiments[i], i});
        }
        const auto ds = lstm::build_dataset(std::move(rows), lookback, split);
        lstm::TrainConfig cfg;
        cfg.lookback = lookback;
        cfg.epochs = epochs;
        cfg.hidden = hidden;
        cfg.batch_size = batch_size;
        cfg.learning_rate = learning_rate;
        cfg.seed = seed;
        lstm::TrainResult r;
        {
          py::gil_scoped_release release;
          r = lstm::train(ds, cfg);
        }
        std::vector<double> train_loss, test_loss, predicted, actual;
        for (const auto& e : r.history) {
          train_loss.push_back(e.train);
          test_loss.push_back(e.test);
        }
        for (const auto& p : lstm::predict_series(r.model, ds, lstm::Split::Test)) {
          predicted.push_back(p.predicted);
          actual.push_back(p.actual);
        }
        py::dict d;
        d["train_loss"] = train_loss;
        d["test_loss"] = test_loss;
        d["predicted"] = predicted;
        d["actual"] = actual;
        d["split_point"] = ds.split_point;
        return d;
      },
      py::arg("opens"), py::arg("sentiments"), py::arg("lookback") = 20, py::arg("epochs") = 100,
      py::arg("hidden") = 128, py::arg("batch_size") = 64, py::arg("learning_rate") = 1e-3, py::arg("seed") = 7,
      py::arg("split") = 0.6);

  // full pipeline; returns the comparison report as JSON text
  m.def(
      "_run_pipeline",
      [](const std::filesystem::path& config, const std::map<std::string, std::string>& overrides) {
        PipelineConfig cfg;
        try {
          cfg = load_config(config);
          for (const auto& [k, v] : overrides) {
            cfg.set(k, v);
          }
        } catch (const Error& e) {
          throw StageError(Stage::Config, e.what());
        }
        py::gil_scoped_release release;
        return dump(run_pipeline(cfg));
      },
      py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{});
}
