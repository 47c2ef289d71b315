#pragma once

// Seeded generators for synthetic stock/sentiment data and on-disk pipeline
// fixtures. Shared by the unit tests and the acceptance suite.

#include "sentilag/ingest.hpp"
#include "sentilag/lstm.hpp"
#include "sentilag/sentiment.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sentilag::testing {

namespace fs = std::filesystem;

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

void write_text(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);

/// `n` consecutive weekdays starting at (or after) `start`.
std::vector<Date> weekdays(Date start, int n);

/// Bars with open_t = close_{t-1}, close from the given daily returns.
ingest::StockSeries bars_from_returns(const std::vector<Date>& dates, const std::vector<double>& returns,
                                      double start_price = 20000.0);

struct PlantedLag {
  ingest::StockSeries stock;
  sentiment::DailySentimentSeries sentiment;
  int lag = 0;
};

/// `days` trading days of N(0, 1%) returns. Sentiment on day d is
/// 0.1 + 0.8 * [return_{d+lag} >= 0] plus uniform noise of amplitude 0.08
/// (10% of the 0.8 signal swing).
PlantedLag planted_lag(std::uint64_t seed, int lag, int days = 500, double noise_fraction = 0.1);

/// Noiseless sine rows (open = amplitude * sin(2 pi t / period) + offset,
/// sentiment constant) on consecutive trading indices.
std::vector<lstm::SequenceRow> sine_rows(int n, double period = 50.0, double amplitude = 1.0, double offset = 0.0);

struct FixtureOptions {
  std::uint64_t seed = 1;
  int days = 500;
  int lag = 12;
  int afa_users = 20;
  int ufa_users = 90;
  int afa_posts_per_day = 6;
  int ufa_posts_per_day = 10;
  double afa_hit_rate = 0.9;  ///< chance an AFA post agrees with the move `lag` days ahead
  // LSTM settings written into the config file
  int hidden = 32;
  int epochs = 60;
  int lookback = 10;
};

struct FixturePaths {
  fs::path posts;
  fs::path profiles;
  fs::path stock;
  fs::path keywords;
  fs::path corpus;
  fs::path config;
  fs::path out;
};

/// Writes a two-group corpus: AFA users (certified analysts) whose posts
/// anticipate the price move `lag` trading days ahead and UFA users whose
/// posts are coin flips, plus a stock file, profiles, keyword list, a
/// sentiment training corpus and a pipeline config.
FixturePaths write_two_group_fixture(const fs::path& dir, const FixtureOptions& opts);

inline const char* kFixtureKeyword = "恒生指数";

}  // namespace sentilag::testing
