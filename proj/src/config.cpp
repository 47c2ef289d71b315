#include "sentilag/config.hpp"

#include "sentilag/csv.hpp"
#include "sentilag/error.hpp"

#include <fstream>

namespace sentilag {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const std::string& value, const fs::path& base) {
  fs::path p(value);
  if (p.is_relative() && !base.empty()) {
    p = base / p;
  }
  return p.lexically_normal();
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("expected a boolean, got '" + v + "'");
}

int parse_int(const std::string& v) { return static_cast<int>(csv::parse_int(v)); }

std::string unknown_policy_name(grouping::UnknownUserPolicy p) {
  switch (p) {
    case grouping::UnknownUserPolicy::AssignUfa: return "ufa";
    case grouping::UnknownUserPolicy::AssignAfa: return "afa";
    case grouping::UnknownUserPolicy::Fail: return "fail";
  }
  return "?";
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value, const fs::path& base) {
  try {
    if (key == "posts") posts = resolve(value, base);
    else if (key == "profiles") profiles = resolve(value, base);
    else if (key == "stock") stock = resolve(value, base);
    else if (key == "keywords") keywords = resolve(value, base);
    else if (key == "labels") labels = resolve(value, base);
    else if (key == "model") model = resolve(value, base);
    else if (key == "corpus") corpus = resolve(value, base);
    else if (key == "out") out = resolve(value, base);
    else if (key == "keyword") keyword = value;
    else if (key == "from") range.first = Date::parse(value);
    else if (key == "to") range.last = Date::parse(value);
    else if (key == "tz_offset_minutes") tz.minutes = parse_int(value);
    else if (key == "unknown_users") {
      if (value == "ufa") unknown_users = grouping::UnknownUserPolicy::AssignUfa;
      else if (value == "afa") unknown_users = grouping::UnknownUserPolicy::AssignAfa;
      else if (value == "fail") unknown_users = grouping::UnknownUserPolicy::Fail;
      else throw Error("expected ufa|afa|fail");
    } else if (key == "aggregate") {
      if (value == "label") aggregate = sentiment::AggregateMode::HardLabel;
      else if (value == "probability") aggregate = sentiment::AggregateMode::Probability;
      else throw Error("expected label|probability");
    } else if (key == "classifier_lr") classifier.learning_rate = csv::parse_double(value);
    else if (key == "classifier_epochs") classifier.epochs = parse_int(value);
    else if (key == "classifier_l2") classifier.l2 = csv::parse_double(value);
    else if (key == "hash_dims") features.hash_dims = static_cast<std::uint32_t>(csv::parse_int(value));
    else if (key == "ngram_orders") {
      features.ngram_orders.clear();
      for (const auto& part : csv::split(value)) {
        features.ngram_orders.insert(parse_int(part));
      }
    } else if (key == "tmin") lag.t_min = parse_int(value);
    else if (key == "tmax") lag.t_max = parse_int(value);
    else if (key == "target") lag.target = lagsearch::parse_target(value);
    else if (key == "fill") lag.fill = lagsearch::parse_fill(value);
    else if (key == "lag_abs") lag.use_abs = parse_bool(value);
    else if (key == "T") {
      if (value.empty() || value == "search") fixed_T.reset();
      else fixed_T = parse_int(value);
    } else if (key == "lookback") train.lookback = parse_int(value);
    else if (key == "hidden") train.hidden = parse_int(value);
    else if (key == "epochs") train.epochs = parse_int(value);
    else if (key == "batch_size") train.batch_size = parse_int(value);
    else if (key == "learning_rate") train.learning_rate = csv::parse_double(value);
    else if (key == "dropout") train.dropout = csv::parse_double(value);
    else if (key == "optimizer") train.optimizer = lstm::parse_optimizer(value);
    else if (key == "seed") train.seed = static_cast<std::uint64_t>(csv::parse_int(value));
    else if (key == "split") split = csv::parse_double(value);
    else if (key == "trend") {
      if (value == "steady-positive") trend = eval::TrendMode::SteadyPositive;
      else if (value == "strict") trend = eval::TrendMode::StrictRise;
      else throw Error("expected steady-positive|strict");
    } else {
      throw Error("unknown key");
    }
  } catch (const Error& e) {
    throw Error("config '" + key + "': " + e.what());
  }
}

void PipelineConfig::validate() const {
  auto require_file = [](const fs::path& p, const char* what) {
    if (p.empty()) {
      throw Error(std::string("config: '") + what + "' is required");
    }
    if (!fs::exists(p)) {
      throw Error(std::string("config: ") + what + " path does not exist: " + p.string());
    }
  };
  require_file(posts, "posts");
  require_file(profiles, "profiles");
  require_file(stock, "stock");
  if (!keywords.empty()) require_file(keywords, "keywords");
  if (!labels.empty()) require_file(labels, "labels");
  if (!model.empty()) require_file(model, "model");
  if (!corpus.empty()) require_file(corpus, "corpus");
  if (labels.empty() && model.empty() && corpus.empty()) {
    throw Error("config: one of labels, model, or corpus is required");
  }
  if (keyword.empty()) {
    throw Error("config: 'keyword' is required");
  }
  if (range.first > range.last) {
    throw Error("config: from is after to");
  }
  if (!(split > 0 && split < 1)) {
    throw Error("config: split must lie in (0,1)");
  }
  if (lag.t_min < 0 || lag.t_min > lag.t_max) {
    throw Error("config: require 0 <= tmin <= tmax");
  }
  if (fixed_T && *fixed_T < 0) {
    throw Error("config: T must be non-negative");
  }
  if (train.lookback < 1 || train.batch_size < 1 || train.hidden < 1 || train.epochs < 0) {
    throw Error("config: lookback, batch_size and hidden must be positive");
  }
  if (!(train.dropout >= 0 && train.dropout < 1)) {
    throw Error("config: dropout must lie in [0,1)");
  }
  if (features.hash_dims < 2 || (features.hash_dims & (features.hash_dims - 1)) != 0) {
    throw Error("config: hash_dims must be a power of two");
  }
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j;
  j["posts"] = posts.generic_string();
  j["profiles"] = profiles.generic_string();
  j["stock"] = stock.generic_string();
  j["keywords"] = keywords.generic_string();
  j["labels"] = labels.generic_string();
  j["model"] = model.generic_string();
  j["corpus"] = corpus.generic_string();
  j["keyword"] = keyword;
  j["from"] = range.first.iso();
  j["to"] = range.last.iso();
  j["tz_offset_minutes"] = tz.minutes;
  j["unknown_users"] = unknown_policy_name(unknown_users);
  j["aggregate"] = aggregate == sentiment::AggregateMode::HardLabel ? "label" : "probability";
  j["classifier_lr"] = classifier.learning_rate;
  j["classifier_epochs"] = classifier.epochs;
  j["classifier_l2"] = classifier.l2;
  j["hash_dims"] = features.hash_dims;
  j["ngram_orders"] = features.ngram_orders;
  j["tmin"] = lag.t_min;
  j["tmax"] = lag.t_max;
  j["target"] = lagsearch::to_string(lag.target);
  j["fill"] = lagsearch::to_string(lag.fill);
  j["lag_abs"] = lag.use_abs;
  j["T"] = fixed_T ? nlohmann::json(*fixed_T) : nlohmann::json("search");
  j["lookback"] = train.lookback;
  j["hidden"] = train.hidden;
  j["epochs"] = train.epochs;
  j["batch_size"] = train.batch_size;
  j["learning_rate"] = train.learning_rate;
  j["dropout"] = train.dropout;
  j["optimizer"] = lstm::to_string(train.optimizer);
  j["seed"] = train.seed;
  j["split"] = split;
  j["trend"] = trend == eval::TrendMode::SteadyPositive ? "steady-positive" : "strict";
  return j;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open config " + path.string());
  }
  PipelineConfig cfg;
  const fs::path base = path.parent_path();
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = csv::trim(line);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw FormatError(path.string(), lineno, "expected key = value");
    }
    try {
      cfg.set(csv::trim(body.substr(0, eq)), csv::trim(body.substr(eq + 1)), base);
    } catch (const Error& e) {
      throw FormatError(path.string(), lineno, e.what());
    }
  }
  return cfg;
}

}  // namespace sentilag
