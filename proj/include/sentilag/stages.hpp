#pragma once

#include "sentilag/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

// File-to-file stage runners shared by the CLI subcommands and the pipeline.
// Every stage reads only its declared inputs and writes into `out`, creating
// the directory when needed. Reports are returned and also written as JSON.
namespace sentilag::stages {

namespace fs = std::filesystem;

/// Writes posts.jsonl (cleaned), stock.csv and ingest_report.json.
nlohmann::json run_ingest(const fs::path& posts, const fs::path& stock, const std::string& keyword,
                          const DateRange& range, TzOffset tz, const fs::path& out);

/// Reads `posts_dir`/posts.jsonl; writes afa/posts.jsonl, ufa/posts.jsonl and
/// group_report.json. An empty `keywords` path selects the built-in list.
nlohmann::json run_group(const fs::path& posts_dir, const fs::path& profiles, const fs::path& keywords,
                         grouping::UnknownUserPolicy policy, TzOffset tz, const fs::path& out);

/// Trains the hashed n-gram classifier from a `label,text` corpus.
nlohmann::json run_train_classifier(const fs::path& corpus, const sentiment::TrainHyper& hyper,
                                    const sentiment::FeatureConfig& features, const fs::path& model_out);

/// Labels every post in `posts_dir`/posts.jsonl, either by scoring with
/// `model` or by joining an external label file. Writes posts.jsonl,
/// labels.jsonl and score_report.json into `out`.
nlohmann::json run_score(const fs::path& model, const fs::path& labels, const fs::path& posts_dir, TzOffset tz,
                         const fs::path& out);

/// Reads a score directory; writes sentiment.csv and aggregate_report.json.
nlohmann::json run_aggregate(const fs::path& scored_dir, TzOffset tz, sentiment::AggregateMode mode,
                             const fs::path& out);

/// Writes lag.csv (T,r,pairs), lag.svg and lag.json.
nlohmann::json run_lagsearch(const fs::path& sentiment_csv, const fs::path& stock_csv,
                             const lagsearch::LagSearchOptions& opts, const fs::path& out);

/// Writes model.json, predictions.csv, loss.csv, prediction.svg and
/// train_report.json.
nlohmann::json run_train(const fs::path& stock_csv, const fs::path& sentiment_csv, int T, double split,
                         lagsearch::FillPolicy fill, const lstm::TrainConfig& cfg, const fs::path& out);

/// Scores predictions.csv rows of the chosen split ("test", "train" or "all")
/// against prior-day opens; writes report.json and days.csv.
nlohmann::json run_evaluate(const fs::path& predictions_csv, const fs::path& stock_csv, const std::string& split,
                            eval::TrendMode mode, const fs::path& out);

/// Serializes a metrics report the way every stage emits it.
nlohmann::json metrics_json(const eval::ConfusionMatrix& m, const eval::MetricsReport& r);

/// Writes `j` pretty-printed with a trailing newline.
void write_json(const fs::path& path, const nlohmann::json& j);

}  // namespace sentilag::stages
