#include "sentilag/pipeline.hpp"

#include "sentilag/stages.hpp"


namespace sentilag {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Config: return "config";
    case Stage::Ingest: return "ingest";
    case Stage::Group: return "group";
    case Stage::Score: return "score";
    case Stage::Aggregate: return "aggregate";
    case Stage::LagSearch: return "lagsearch";
    case Stage::Train: return "train";
    case Stage::Evaluate: return "evaluate";
    case Stage::Report: return "report";
  }
  return "?";
}

namespace {

template <class F>
auto guarded(Stage stage, const std::string& branch, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, (branch.empty() ? std::string() : "[" + branch + "] ") + e.what());
  }
}

json run_branch(const PipelineConfig& cfg, const std::string& name, const fs::path& posts_dir,
                const fs::path& model, const fs::path& stock_csv) {
  const fs::path root = cfg.out / name;
  json branch;
  branch["score"] = guarded(Stage::Score, name, [&] {
    return stages::run_score(model, cfg.labels, posts_dir, cfg.tz, root / "score");
  });
  branch["aggregate"] = guarded(Stage::Aggregate, name, [&] {
    return stages::run_aggregate(root / "score", cfg.tz, cfg.aggregate, root / "aggregate");
  });
  const fs::path sentiment_csv = root / "aggregate" / "sentiment.csv";
  const json lag = guarded(Stage::LagSearch, name, [&] {
    return stages::run_lagsearch(sentiment_csv, stock_csv, cfg.lag, root / "lagsearch");
  });
  branch["lagsearch"] = lag;
  const int T = cfg.fixed_T ? *cfg.fixed_T : lag.at("best_T").get<int>();
  branch["T"] = T;
  branch["T_source"] = cfg.fixed_T ? "fixed" : "search";
  branch["train"] = guarded(Stage::Train, name, [&] {
    return stages::run_train(stock_csv, sentiment_csv, T, cfg.split, cfg.lag.fill, cfg.train, root / "train");
  });
  branch["evaluate"] = guarded(Stage::Evaluate, name, [&] {
    return stages::run_evaluate(root / "train" / "predictions.csv", stock_csv, "test", cfg.trend,
                                root / "evaluate");
  });
  return branch;
}

}  // namespace

json compare_reports(const json& afa, const json& ufa) {
  json out;
  const double pa = afa.at("precision").get<double>();
  const double pu = ufa.at("precision").get<double>();
  out["precision_afa"] = pa;
  out["precision_ufa"] = pu;
  out["accuracy_afa"] = afa.at("accuracy");
  out["accuracy_ufa"] = ufa.at("accuracy");
  if (pu > 0) {
    out["precision_gap"] = pa / pu - 1.0;
  } else {
    out["precision_gap"] = nullptr;
  }
  out["afa_more_precise"] = pa > pu;
  return out;
}

json run_pipeline(const PipelineConfig& cfg) {
  guarded(Stage::Config, "", [&] {
    cfg.validate();
    return 0;
  });
  const fs::path ingest_dir = cfg.out / "ingest";
  const fs::path group_dir = cfg.out / "group";
  json report;
  report["config"] = cfg.to_json();
  report["ingest"] = guarded(Stage::Ingest, "", [&] {
    return stages::run_ingest(cfg.posts, cfg.stock, cfg.keyword, cfg.range, cfg.tz, ingest_dir);
  });
  report["group"] = guarded(Stage::Group, "", [&] {
    return stages::run_group(ingest_dir, cfg.profiles, cfg.keywords, cfg.unknown_users, cfg.tz, group_dir);
  });
  fs::path model = cfg.model;
  if (cfg.labels.empty() && model.empty()) {
    model = cfg.out / "classifier" / "model.json";
    report["classifier"] = guarded(Stage::Score, "", [&] {
      return stages::run_train_classifier(cfg.corpus, cfg.classifier, cfg.features, model);
    });
  }
  const fs::path stock_csv = ingest_dir / "stock.csv";
  json groups;
  groups["AFA"] = run_branch(cfg, "afa", group_dir / "afa", model, stock_csv);
  groups["UFA"] = run_branch(cfg, "ufa", group_dir / "ufa", model, stock_csv);
  report["groups"] = groups;
  report["comparison"] = guarded(Stage::Report, "", [&] {
    json c = compare_reports(groups["AFA"]["evaluate"], groups["UFA"]["evaluate"]);
    json lags;
    for (const char* g : {"AFA", "UFA"}) {
      lags[g] = {{"best_T", groups[g]["lagsearch"]["best_T"]},
                 {"best_r", groups[g]["lagsearch"]["best_r"]},
                 {"curve", groups[g]["lagsearch"]["correlations"]}};
    }
    c["lag"] = lags;
    return c;
  });
  guarded(Stage::Report, "", [&] {
    stages::write_json(cfg.out / "comparison.json", report);
    return 0;
  });
  return report;
}

}  // namespace sentilag
