#pragma once

#include "sentilag/config.hpp"
#include "sentilag/error.hpp"

#include <json.hpp>

#include <string>

namespace sentilag {

/// Pipeline stage identifiers; the value doubles as the CLI exit code.
enum class Stage : int {
  Config = 2,
  Ingest = 3,
  Group = 4,
  Score = 5,
  Aggregate = 6,
  LagSearch = 7,
  Train = 8,
  Evaluate = 9,
  Report = 10,
};

std::string to_string(Stage s);

class StageError : public Error {
 public:
  StageError(Stage stage, const std::string& cause)
      : Error("stage '" + to_string(stage) + "' failed: " + cause), stage_(stage) {}

  Stage stage() const noexcept { return stage_; }
  int exit_code() const noexcept { return static_cast<int>(stage_); }

 private:
  Stage stage_;
};

/// Runs ingest, grouping, scoring, aggregation, lag search, training and
/// evaluation for the AFA and UFA partitions and writes comparison.json under
/// `cfg.out`. Throws StageError.
nlohmann::json run_pipeline(const PipelineConfig& cfg);

/// Comparison summary from two evaluation reports (as written by
/// stages::run_evaluate).
nlohmann::json compare_reports(const nlohmann::json& afa, const nlohmann::json& ufa);

}  // namespace sentilag
