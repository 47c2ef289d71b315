#include "sentilag/stages.hpp"

#include "sentilag/csv.hpp"
#include "sentilag/error.hpp"
#include "sentilag/plots.hpp"

#include <cmath>
#include <fstream>
#include <unordered_map>

namespace sentilag::stages {

using json = nlohmann::json;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error("cannot create directory " + dir.string() + ": " + ec.message());
  }
}

json issues_json(const std::vector<ingest::LineIssue>& issues) {
  json arr = json::array();
  for (const auto& i : issues) {
    arr.push_back({{"line", i.line}, {"reason", i.reason}});
  }
  return arr;
}

json optional_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct PredictionRow {
  eval::PricePoint point;
  double predicted_norm = 0;
  double actual_norm = 0;
  std::string split;
};

std::vector<PredictionRow> read_predictions(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::vector<PredictionRow> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || csv::trim(line).empty()) {
      continue;
    }
    const auto cells = csv::split(line);
    if (cells.size() != 6) {
      throw FormatError(path.string(), lineno,
                        "expected date,predicted,actual,predicted_norm,actual_norm,split");
    }
    try {
      PredictionRow r;
      r.point.date = Date::parse(csv::trim(cells[0]));
      r.point.predicted = csv::parse_double(cells[1]);
      r.point.actual = csv::parse_double(cells[2]);
      r.predicted_norm = csv::parse_double(cells[3]);
      r.actual_norm = csv::parse_double(cells[4]);
      r.split = csv::trim(cells[5]);
      rows.push_back(r);
    } catch (const Error& e) {
      throw FormatError(path.string(), lineno, e.what());
    }
  }
  return rows;
}

}  // namespace

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << j.dump(2) << '\n';
}

json metrics_json(const eval::ConfusionMatrix& m, const eval::MetricsReport& r) {
  json j;
  j["confusion"] = {{"tp", m.tp}, {"fn", m.fn}, {"fp", m.fp}, {"tn", m.tn}, {"total", m.total()}};
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["accuracy"] = r.accuracy;
  j["flags"] = {{"precision_undefined", r.precision_undefined},
                {"recall_undefined", r.recall_undefined},
                {"f1_undefined", r.f1_undefined}};
  return j;
}

json run_ingest(const fs::path& posts, const fs::path& stock, const std::string& keyword, const DateRange& range,
                TzOffset tz, const fs::path& out) {
  ensure_dir(out);
  ingest::LoadPostsOptions opts;
  opts.keyword = keyword;
  opts.range = range;
  opts.tz = tz;
  const auto loaded = ingest::load_posts(posts, opts);
  const auto cleaned = ingest::clean_posts(loaded);
  ingest::write_posts(out / "posts.jsonl", cleaned.posts, tz);
  const auto series = ingest::load_stock_bars(stock);
  ingest::write_stock_bars(out / "stock.csv", series);
  json report;
  report["keyword"] = keyword;
  report["from"] = range.first.iso();
  report["to"] = range.last.iso();
  report["posts_matched"] = loaded.posts.size();
  report["posts_kept"] = cleaned.posts.size();
  report["dropped_empty"] = cleaned.dropped_empty;
  report["dropped_duplicate"] = cleaned.dropped_duplicate;
  report["malformed"] = issues_json(loaded.malformed);
  report["stock_bars"] = series.size();
  if (!series.bars.empty()) {
    report["stock_first"] = series.bars.front().date.iso();
    report["stock_last"] = series.bars.back().date.iso();
  }
  write_json(out / "ingest_report.json", report);
  return report;
}

json run_group(const fs::path& posts_dir, const fs::path& profiles, const fs::path& keywords,
               grouping::UnknownUserPolicy policy, TzOffset tz, const fs::path& out) {
  const auto posts = ingest::read_posts(posts_dir / "posts.jsonl", tz);
  const auto index = grouping::load_profiles(profiles);
  const auto words = keywords.empty() ? grouping::default_keywords() : grouping::load_keywords(keywords);
  const auto part = grouping::partition_posts(posts, index, words, policy);
  ensure_dir(out / "afa");
  ensure_dir(out / "ufa");
  ingest::write_posts(out / "afa" / "posts.jsonl", part.afa, tz);
  ingest::write_posts(out / "ufa" / "posts.jsonl", part.ufa, tz);
  json report;
  report["posts"] = posts.size();
  report["afa_posts"] = part.afa.size();
  report["ufa_posts"] = part.ufa.size();
  report["afa_users"] = part.afa_users;
  report["ufa_users"] = part.ufa_users;
  report["unknown_user_posts"] = part.unknown_users;
  report["keywords"] = words;
  write_json(out / "group_report.json", report);
  return report;
}

json run_train_classifier(const fs::path& corpus, const sentiment::TrainHyper& hyper,
                          const sentiment::FeatureConfig& features, const fs::path& model_out) {
  const auto items = sentiment::load_corpus(corpus);
  const auto result = sentiment::train_classifier(items, hyper, features);
  if (model_out.has_parent_path()) {
    ensure_dir(model_out.parent_path());
  }
  sentiment::save_model(model_out, result.model);
  std::size_t correct = 0;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto s = sentiment::score(result.model, items[k].text);
    correct += s.label == items[k].label ? 1 : 0;
  }
  json report;
  report["examples"] = items.size();
  report["initial_loss"] = result.loss_history.front();
  report["final_loss"] = result.loss_history.back();
  report["training_accuracy"] = items.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(items.size());
  return report;
}

json run_score(const fs::path& model, const fs::path& labels, const fs::path& posts_dir, TzOffset tz,
               const fs::path& out) {
  const auto posts = ingest::read_posts(posts_dir / "posts.jsonl", tz);
  std::vector<sentiment::SentimentLabel> result;
  json report;
  if (!labels.empty()) {
    const auto external = sentiment::ingest_labels(labels);
    std::unordered_map<std::string, const sentiment::SentimentLabel*> by_id;
    for (const auto& l : external) {
      by_id.emplace(l.post_id, &l);
    }
    std::size_t missing = 0;
    for (const auto& p : posts) {
      const auto it = by_id.find(p.post_id);
      if (it == by_id.end()) {
        ++missing;
        continue;
      }
      result.push_back(*it->second);
    }
    report["source"] = "labels";
    report["unlabeled_posts"] = missing;
  } else if (!model.empty()) {
    const auto m = sentiment::load_model(model);
    result.reserve(posts.size());
    for (const auto& p : posts) {
      result.push_back(sentiment::score(m, p.text, p.post_id));
    }
    report["source"] = "model";
    report["unlabeled_posts"] = 0;
  } else {
    throw Error("score: either a model or a label file is required");
  }
  ensure_dir(out);
  ingest::write_posts(out / "posts.jsonl", posts, tz);
  sentiment::write_labels(out / "labels.jsonl", result);
  std::size_t positive = 0;
  for (const auto& l : result) {
    positive += static_cast<std::size_t>(l.label);
  }
  report["posts"] = posts.size();
  report["labeled"] = result.size();
  report["positive"] = positive;
  write_json(out / "score_report.json", report);
  return report;
}

json run_aggregate(const fs::path& scored_dir, TzOffset tz, sentiment::AggregateMode mode, const fs::path& out) {
  const auto posts = ingest::read_posts(scored_dir / "posts.jsonl", tz);
  const auto labels = sentiment::ingest_labels(scored_dir / "labels.jsonl");
  const auto agg = sentiment::daily_aggregate(labels, posts, tz, mode);
  ensure_dir(out);
  sentiment::write_series(out / "sentiment.csv", agg.series);
  json report;
  report["days"] = agg.series.size();
  report["unlabeled_posts"] = agg.unlabeled_posts;
  report["orphan_labels"] = agg.orphan_labels;
  report["mode"] = mode == sentiment::AggregateMode::HardLabel ? "label" : "probability";
  if (!agg.series.empty()) {
    report["first_day"] = agg.series.begin()->first.iso();
    report["last_day"] = agg.series.rbegin()->first.iso();
  }
  write_json(out / "aggregate_report.json", report);
  return report;
}

json run_lagsearch(const fs::path& sentiment_csv, const fs::path& stock_csv, const lagsearch::LagSearchOptions& opts,
                   const fs::path& out) {
  const auto series = sentiment::read_series(sentiment_csv);
  const auto stock = ingest::load_stock_bars(stock_csv);
  const auto result = lagsearch::search_lag(series, stock, opts);
  ensure_dir(out);
  lagsearch::write_lag_csv(out / "lag.csv", result);
  plots::Series curve{"Pearson r", {}, {}};
  json rows = json::array();
  for (const auto& [T, r] : result.correlations) {
    curve.x.push_back(T);
    curve.y.push_back(r);
    rows.push_back({{"T", T}, {"r", r}, {"pairs", result.pairs.at(T)}});
  }
  plots::ChartOptions chart;
  chart.title = "Pearson correlation by lag T (" + lagsearch::to_string(opts.target) + ")";
  chart.x_label = "T";
  chart.y_label = "r";
  plots::write_line_chart(out / "lag.svg", {curve}, chart);
  json skipped = json::array();
  for (const auto& [T, why] : result.skipped) {
    skipped.push_back({{"T", T}, {"reason", why}});
  }
  json report;
  report["best_T"] = result.best_T;
  report["best_r"] = result.best_r;
  report["target"] = lagsearch::to_string(opts.target);
  report["fill"] = lagsearch::to_string(opts.fill);
  report["mode"] = opts.use_abs ? "abs" : "signed";
  report["tmin"] = opts.t_min;
  report["tmax"] = opts.t_max;
  report["correlations"] = rows;
  report["skipped"] = skipped;
  write_json(out / "lag.json", report);
  return report;
}

json run_train(const fs::path& stock_csv, const fs::path& sentiment_csv, int T, double split,
               lagsearch::FillPolicy fill, const lstm::TrainConfig& cfg, const fs::path& out) {
  const auto stock = ingest::load_stock_bars(stock_csv);
  const auto series = sentiment::read_series(sentiment_csv);
  const auto ds = lstm::build_dataset(stock, series, T, cfg.lookback, split, fill);
  const auto result = lstm::train(ds, cfg);
  ensure_dir(out);
  lstm::save_checkpoint(out / "model.json", lstm::Checkpoint{result.model, ds.norm, cfg, T});

  const auto train_pred = lstm::predict_series(result.model, ds, lstm::Split::Train);
  const auto test_pred = lstm::predict_series(result.model, ds, lstm::Split::Test);
  {
    std::ofstream csv_out(out / "predictions.csv", std::ios::binary | std::ios::trunc);
    if (!csv_out) {
      throw Error("cannot write " + (out / "predictions.csv").string());
    }
    csv_out << "date,predicted,actual,predicted_norm,actual_norm,split\n";
    for (const auto* part : {&train_pred, &test_pred}) {
      const char* name = part == &train_pred ? "train" : "test";
      for (const auto& p : *part) {
        csv_out << p.date.iso() << ',' << csv::number(p.predicted) << ',' << csv::number(p.actual) << ','
                << csv::number(p.predicted_norm) << ',' << csv::number(p.actual_norm) << ',' << name << '\n';
      }
    }
  }
  {
    std::ofstream loss_out(out / "loss.csv", std::ios::binary | std::ios::trunc);
    loss_out << "epoch,train_mse,test_mse\n";
    for (std::size_t e = 0; e < result.history.size(); ++e) {
      loss_out << e + 1 << ',' << csv::number(result.history[e].train) << ','
               << csv::number(result.history[e].test) << '\n';
    }
  }
  plots::Series predicted{"predicted open", {}, {}};
  plots::Series actual{"actual open", {}, {}};
  for (const auto* part : {&train_pred, &test_pred}) {
    for (const auto& p : *part) {
      predicted.x.push_back(p.date.days);
      predicted.y.push_back(p.predicted);
      actual.x.push_back(p.date.days);
      actual.y.push_back(p.actual);
    }
  }
  plots::ChartOptions chart;
  chart.title = "Predicted vs. actual opening price (T=" + std::to_string(T) + ")";
  chart.x_label = "date";
  chart.y_label = "open";
  chart.x_is_date = true;
  plots::write_line_chart(out / "prediction.svg", {actual, predicted}, chart);
  plots::write_series_csv(out / "prediction_plot.csv", {actual, predicted}, chart);

  json report;
  report["T"] = T;
  report["rows"] = ds.rows.size();
  report["split_point"] = ds.split_point;
  report["train_windows"] = ds.train_windows.size();
  report["test_windows"] = ds.test_windows.size();
  report["parameters"] = result.model.parameter_count();
  report["normalization"] = {{"open", {{"min", ds.norm[0].min}, {"max", ds.norm[0].max}}},
                             {"sentiment", {{"min", ds.norm[1].min}, {"max", ds.norm[1].max}}}};
  if (!result.history.empty()) {
    report["final_train_mse"] = optional_number(result.history.back().train);
    report["final_test_mse"] = optional_number(result.history.back().test);
  }
  report["config"] = {{"batch_size", cfg.batch_size}, {"epochs", cfg.epochs},     {"learning_rate", cfg.learning_rate},
                      {"seed", cfg.seed},             {"lookback", cfg.lookback}, {"hidden", cfg.hidden},
                      {"dropout", cfg.dropout},       {"optimizer", lstm::to_string(cfg.optimizer)},
                      {"split", split},               {"fill", lagsearch::to_string(fill)}};
  write_json(out / "train_report.json", report);
  return report;
}

json run_evaluate(const fs::path& predictions_csv, const fs::path& stock_csv, const std::string& split,
                  eval::TrendMode mode, const fs::path& out) {
  if (split != "test" && split != "train" && split != "all") {
    throw Error("evaluate: split must be test, train or all");
  }
  const auto rows = read_predictions(predictions_csv);
  const auto stock = ingest::load_stock_bars(stock_csv);
  std::vector<eval::PricePoint> points;
  std::vector<double> pn;
  std::vector<double> an;
  std::vector<double> pp;
  std::vector<double> ap;
  for (const auto& r : rows) {
    if (split != "all" && r.split != split) {
      continue;
    }
    points.push_back(r.point);
    pn.push_back(r.predicted_norm);
    an.push_back(r.actual_norm);
    pp.push_back(r.point.predicted);
    ap.push_back(r.point.actual);
  }
  if (points.empty()) {
    throw Error("evaluate: no predictions in split '" + split + "'");
  }
  const auto trends = eval::trend_labels(points, stock, mode);
  const auto matrix = eval::confusion(trends);
  const auto m = eval::metrics(matrix);
  ensure_dir(out);
  {
    std::ofstream days(out / "days.csv", std::ios::binary | std::ios::trunc);
    if (!days) {
      throw Error("cannot write " + (out / "days.csv").string());
    }
    days << "date,predicted,actual,pred_trend,actual_trend\n";
    for (const auto& d : trends.days) {
      days << d.date.iso() << ',' << csv::number(d.predicted) << ',' << csv::number(d.actual) << ','
           << (d.pred_positive ? 1 : 0) << ',' << (d.actual_positive ? 1 : 0) << '\n';
    }
  }
  json report = metrics_json(matrix, m);
  report["mse"] = eval::mse(pn, an);
  report["mse_price"] = eval::mse(pp, ap);
  report["days"] = {{"evaluated", trends.days.size()}, {"dropped", trends.dropped}};
  report["split"] = split;
  report["trend_mode"] = mode == eval::TrendMode::SteadyPositive ? "steady-positive" : "strict";
  write_json(out / "report.json", report);
  return report;
}

}  // namespace sentilag::stages
