// sentilag: command-line front end for the sentiment lead-lag forecasting
// pipeline. Every subcommand runs one stage; `pipeline` runs them all.

#include "sentilag/config.hpp"
#include "sentilag/pipeline.hpp"
#include "sentilag/stages.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace fs = std::filesystem;
using namespace sentilag;

namespace {

void print_summary(const nlohmann::json& report) { std::cout << report.dump(2) << '\n'; }

grouping::UnknownUserPolicy parse_unknown(const std::string& v) {
  if (v == "ufa") return grouping::UnknownUserPolicy::AssignUfa;
  if (v == "afa") return grouping::UnknownUserPolicy::AssignAfa;
  if (v == "fail") return grouping::UnknownUserPolicy::Fail;
  throw Error("--unknown-users must be ufa, afa or fail");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentiment lead-lag stock forecasting pipeline"};
  app.require_subcommand(1);

  int tz_minutes = 480;
  app.add_option("--tz-offset-minutes", tz_minutes, "Working timezone offset from UTC")->capture_default_str();

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Filter and clean posts; validate stock bars");
  std::string posts_path;
  std::string stock_path;
  std::string keyword;
  std::string from = "2018-01-01";
  std::string to = "2019-12-31";
  std::string out_dir;
  ingest_cmd->add_option("--posts", posts_path, "Posts JSONL")->required();
  ingest_cmd->add_option("--stock", stock_path, "Stock bars CSV")->required();
  ingest_cmd->add_option("--keyword", keyword, "Keyword (case-insensitive)")->required();
  ingest_cmd->add_option("--from", from, "First date (inclusive)")->capture_default_str();
  ingest_cmd->add_option("--to", to, "Last date (inclusive)")->capture_default_str();
  ingest_cmd->add_option("--out", out_dir, "Output directory")->required();

  // group
  auto* group_cmd = app.add_subcommand("group", "Split posts into AFA and UFA partitions");
  std::string posts_dir;
  std::string profiles_path;
  std::string keywords_path;
  std::string unknown_users = "ufa";
  group_cmd->add_option("--posts", posts_dir, "Directory holding posts.jsonl")->required();
  group_cmd->add_option("--profiles", profiles_path, "Profiles JSONL")->required();
  group_cmd->add_option("--keywords", keywords_path, "Keyword file (one per line); default list if omitted");
  group_cmd->add_option("--unknown-users", unknown_users, "ufa|afa|fail")->capture_default_str();
  group_cmd->add_option("--out", out_dir, "Output directory")->required();

  // train-classifier
  auto* tc_cmd = app.add_subcommand("train-classifier", "Train the hashed n-gram sentiment classifier");
  std::string corpus_path;
  std::string model_path;
  sentiment::TrainHyper hyper;
  tc_cmd->add_option("--corpus", corpus_path, "label,text CSV")->required();
  tc_cmd->add_option("--out", model_path, "Model file to write")->required();
  tc_cmd->add_option("--lr", hyper.learning_rate)->capture_default_str();
  tc_cmd->add_option("--epochs", hyper.epochs)->capture_default_str();
  tc_cmd->add_option("--l2", hyper.l2)->capture_default_str();

  // score
  auto* score_cmd = app.add_subcommand("score", "Label posts by model or external label file");
  std::string labels_path;
  auto* model_opt = score_cmd->add_option("--model", model_path, "Sentiment model file");
  auto* labels_opt = score_cmd->add_option("--labels", labels_path, "External label JSONL");
  model_opt->excludes(labels_opt);
  score_cmd->add_option("--posts", posts_dir, "Directory holding posts.jsonl")->required();
  score_cmd->add_option("--out", out_dir, "Output directory")->required();

  // aggregate
  auto* agg_cmd = app.add_subcommand("aggregate", "Daily mean sentiment per group");
  std::string scored_dir;
  bool probability_mode = false;
  agg_cmd->add_option("--scored", scored_dir, "Directory written by score")->required();
  agg_cmd->add_flag("--probability", probability_mode, "Average probabilities instead of hard labels");
  agg_cmd->add_option("--out", out_dir, "Output directory")->required();

  // lagsearch
  auto* lag_cmd = app.add_subcommand("lagsearch", "Pearson lead-lag window search");
  std::string sentiment_path;
  int tmin = 3;
  int tmax = 30;
  std::string target = "change_pct";
  std::string fill = "neutral";
  bool use_abs = false;
  lag_cmd->add_option("--sentiment", sentiment_path, "sentiment.csv")->required();
  lag_cmd->add_option("--stock", stock_path, "Stock bars CSV")->required();
  lag_cmd->add_option("--tmin", tmin)->capture_default_str();
  lag_cmd->add_option("--tmax", tmax)->capture_default_str();
  lag_cmd->add_option("--target", target, "open|close|change_pct")->capture_default_str();
  lag_cmd->add_option("--fill", fill, "drop|carry-forward|neutral")->capture_default_str();
  lag_cmd->add_flag("--abs", use_abs, "Maximize |r| instead of r");
  lag_cmd->add_option("--out", out_dir, "Output directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the two-layer LSTM regressor");
  lstm::TrainConfig tcfg;
  int T = 12;
  double split = 0.6;
  std::string optimizer = "adam";
  train_cmd->add_option("--stock", stock_path, "Stock bars CSV")->required();
  train_cmd->add_option("--sentiment", sentiment_path, "sentiment.csv")->required();
  train_cmd->add_option("--T", T, "Sentiment lead in trading days")->capture_default_str();
  train_cmd->add_option("--lookback", tcfg.lookback)->capture_default_str();
  train_cmd->add_option("--epochs", tcfg.epochs)->capture_default_str();
  train_cmd->add_option("--seed", tcfg.seed)->capture_default_str();
  train_cmd->add_option("--hidden", tcfg.hidden)->capture_default_str();
  train_cmd->add_option("--batch", tcfg.batch_size)->capture_default_str();
  train_cmd->add_option("--lr", tcfg.learning_rate)->capture_default_str();
  train_cmd->add_option("--dropout", tcfg.dropout)->capture_default_str();
  train_cmd->add_option("--optimizer", optimizer, "adam|sgd")->capture_default_str();
  train_cmd->add_option("--split", split, "Training fraction")->capture_default_str();
  train_cmd->add_option("--fill", fill, "drop|carry-forward|neutral")->capture_default_str();
  train_cmd->add_option("--out", out_dir, "Output directory")->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Trend classification metrics and MSE");
  std::string predictions_path;
  std::string eval_split = "test";
  bool strict = false;
  eval_cmd->add_option("--predictions", predictions_path, "predictions.csv from train")->required();
  eval_cmd->add_option("--stock", stock_path, "Stock bars CSV")->required();
  eval_cmd->add_option("--split", eval_split, "test|train|all")->capture_default_str();
  eval_cmd->add_flag("--strict", strict, "Count steady days as falling");
  eval_cmd->add_option("--out", out_dir, "Output directory")->required();

  // pipeline
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run every stage for both groups");
  std::string config_path;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;
  pipe_cmd->add_option("--config", config_path, "key = value config file")->required();
  auto* seed_opt = pipe_cmd->add_option("--seed", seed, "Override the training seed");
  auto* out_opt = pipe_cmd->add_option("--out", out_dir, "Override the output directory");
  pipe_cmd->add_option("--set", overrides, "Override any config key (key=value)");

  CLI11_PARSE(app, argc, argv);
  const TzOffset tz{tz_minutes};

  try {
    if (ingest_cmd->parsed()) {
      print_summary(stages::run_ingest(posts_path, stock_path, keyword, DateRange{Date::parse(from), Date::parse(to)},
                                       tz, out_dir));
    } else if (group_cmd->parsed()) {
      print_summary(stages::run_group(posts_dir, profiles_path, keywords_path, parse_unknown(unknown_users), tz,
                                      out_dir));
    } else if (tc_cmd->parsed()) {
      print_summary(stages::run_train_classifier(corpus_path, hyper, {}, model_path));
    } else if (score_cmd->parsed()) {
      if (model_path.empty() && labels_path.empty()) {
        throw Error("score: pass --model or --labels");
      }
      print_summary(stages::run_score(model_path, labels_path, posts_dir, tz, out_dir));
    } else if (agg_cmd->parsed()) {
      print_summary(stages::run_aggregate(
          scored_dir, tz, probability_mode ? sentiment::AggregateMode::Probability : sentiment::AggregateMode::HardLabel,
          out_dir));
    } else if (lag_cmd->parsed()) {
      lagsearch::LagSearchOptions opts;
      opts.t_min = tmin;
      opts.t_max = tmax;
      opts.target = lagsearch::parse_target(target);
      opts.fill = lagsearch::parse_fill(fill);
      opts.use_abs = use_abs;
      print_summary(stages::run_lagsearch(sentiment_path, stock_path, opts, out_dir));
    } else if (train_cmd->parsed()) {
      tcfg.optimizer = lstm::parse_optimizer(optimizer);
      print_summary(
          stages::run_train(stock_path, sentiment_path, T, split, lagsearch::parse_fill(fill), tcfg, out_dir));
    } else if (eval_cmd->parsed()) {
      print_summary(stages::run_evaluate(predictions_path, stock_path, eval_split,
                                         strict ? eval::TrendMode::StrictRise : eval::TrendMode::SteadyPositive,
                                         out_dir));
    } else if (pipe_cmd->parsed()) {
      PipelineConfig cfg;
      try {
        cfg = load_config(config_path);
        for (const auto& kv : overrides) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) {
            throw Error("--set expects key=value, got '" + kv + "'");
          }
          cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (*seed_opt) {
          cfg.train.seed = seed;
        }
        if (*out_opt) {
          cfg.out = out_dir;
        }
      } catch (const Error& e) {
        throw StageError(Stage::Config, e.what());
      }
      const auto report = run_pipeline(cfg);
      print_summary(report.at("comparison"));
    }
  } catch (const StageError& e) {
    std::cerr << "sentilag: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "sentilag: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
