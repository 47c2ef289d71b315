#pragma once

#include "sentilag/ingest.hpp"
#include "sentilag/sentiment.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sentilag::lagsearch {

enum class TargetColumn { Open, Close, ChangePct };

std::string to_string(TargetColumn t);
TargetColumn parse_target(const std::string& s);

/// How trading days without any posts are filled before shifting.
enum class FillPolicy { Drop, CarryForward, Neutral };

std::string to_string(FillPolicy f);
FillPolicy parse_fill(const std::string& s);

inline constexpr double kNeutralSentiment = 0.5;

/// Pearson product-moment correlation. Throws DomainError on length mismatch,
/// fewer than 3 points, or a constant series.
double pearson(std::span<const double> x, std::span<const double> y);

/// Sentiment mapped onto the stock calendar: non-trading days merge into the
/// next trading day (post-count weighted); trading days inside the covered
/// span with no posts are filled per policy. Index i refers to bar i.
struct TradingSentiment {
  std::vector<std::optional<double>> value;
  std::vector<std::int64_t> posts;
};

TradingSentiment to_trading_days(const sentiment::DailySentimentSeries& s, const ingest::StockSeries& stock,
                                 FillPolicy fill = FillPolicy::Neutral);

double target_value(const ingest::StockBar& bar, TargetColumn target);

struct AlignedPairs {
  std::vector<double> sentiment;
  std::vector<double> target;
  std::vector<Date> sentiment_dates;  ///< trading day the sentiment was mapped to
  std::vector<Date> target_dates;

  std::size_t size() const { return sentiment.size(); }
};

/// Pairs the sentiment of trading day i with the target of trading day i+T.
/// Throws DomainError for T < 0 or an empty overlap.
AlignedPairs shift_align(const sentiment::DailySentimentSeries& s, const ingest::StockSeries& stock, int T,
                         TargetColumn target, FillPolicy fill = FillPolicy::Neutral);

AlignedPairs shift_align(const TradingSentiment& ts, const ingest::StockSeries& stock, int T,
                         TargetColumn target);

struct LagSearchOptions {
  int t_min = 3;
  int t_max = 30;
  TargetColumn target = TargetColumn::ChangePct;
  FillPolicy fill = FillPolicy::Neutral;
  bool use_abs = false;  ///< argmax of |r| instead of signed r
};

struct LagSearchResult {
  int best_T = 0;
  double best_r = 0;
  std::map<int, double> correlations;
  std::map<int, std::size_t> pairs;
  std::map<int, std::string> skipped;  ///< T -> reason
  TargetColumn target = TargetColumn::ChangePct;
};

/// Evaluates r for every T in [t_min, t_max]; ties go to the smaller T.
/// Throws when no T yields a defined correlation.
LagSearchResult search_lag(const sentiment::DailySentimentSeries& s, const ingest::StockSeries& stock,
                           const LagSearchOptions& opts = {});

/// `T,r,pairs` rows for the evaluated lags.
void write_lag_csv(const std::filesystem::path& path, const LagSearchResult& r);

}  // namespace sentilag::lagsearch
