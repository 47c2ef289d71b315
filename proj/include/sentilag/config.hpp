#pragma once

#include "sentilag/dates.hpp"
#include "sentilag/eval.hpp"
#include "sentilag/grouping.hpp"
#include "sentilag/lagsearch.hpp"
#include "sentilag/lstm.hpp"
#include "sentilag/sentiment.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace sentilag {

/// Everything one end-to-end run needs. Loaded from a `key = value` file
/// (`#` starts a comment line);
/// relative paths resolve against the file's directory.
struct PipelineConfig {
  std::filesystem::path posts;
  std::filesystem::path profiles;
  std::filesystem::path stock;
  std::filesystem::path keywords;  ///< empty: built-in default list
  std::filesystem::path labels;    ///< external label file (takes precedence)
  std::filesystem::path model;     ///< trained sentiment model
  std::filesystem::path corpus;    ///< `label,text` corpus to train a model from
  std::filesystem::path out = "sentilag-out";

  std::string keyword;
  DateRange range{Date::from_ymd(2018, 1, 1), Date::from_ymd(2019, 12, 31)};
  TzOffset tz;

  grouping::UnknownUserPolicy unknown_users = grouping::UnknownUserPolicy::AssignUfa;
  sentiment::AggregateMode aggregate = sentiment::AggregateMode::HardLabel;
  sentiment::TrainHyper classifier;
  sentiment::FeatureConfig features;

  lagsearch::LagSearchOptions lag;
  std::optional<int> fixed_T;  ///< when set, trains at this lag instead of the searched best

  lstm::TrainConfig train;
  double split = 0.6;
  eval::TrendMode trend = eval::TrendMode::SteadyPositive;

  /// Applies one setting; throws Error on an unknown key or bad value.
  void set(const std::string& key, const std::string& value, const std::filesystem::path& base = {});

  /// Throws Error naming the first violated invariant.
  void validate() const;

  /// Stable echo of every setting (paths as given).
  nlohmann::json to_json() const;
};

PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace sentilag
