#pragma once

#include "sentilag/dates.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sentilag::ingest {

struct PostRecord {
  std::string post_id;
  std::string user_id;
  Timestamp created_at;
  std::string text;
  std::int64_t comments = 0;
  std::int64_t reposts = 0;
  std::int64_t likes = 0;

  bool operator==(const PostRecord&) const = default;
};

/// A rejected input line and the reason.
struct LineIssue {
  long line = 0;
  std::string reason;
};

struct PostCollection {
  std::vector<PostRecord> posts;
  /// Lines that failed schema validation (skipped).
  std::vector<LineIssue> malformed;
  /// Records dropped by cleaning (empty text or duplicate).
  std::size_t dropped_empty = 0;
  std::size_t dropped_duplicate = 0;
};

struct LoadPostsOptions {
  std::string keyword;
  DateRange range;
  TzOffset tz;
  /// Fatal when malformed lines exceed this fraction of all non-blank lines.
  double max_malformed_fraction = 0.5;
};

/// Reads the posts JSONL contract and keeps records whose text contains the
/// keyword (case-insensitive) and whose local date falls inside the range.
PostCollection load_posts(const std::filesystem::path& path, const LoadPostsOptions& opts);

/// Text normalization plus (user_id, normalized text) de-duplication; first
/// occurrence wins.
PostCollection clean_posts(const PostCollection& in);

/// Writes the JSONL contract (created_at rendered in `tz`).
void write_posts(const std::filesystem::path& path, const std::vector<PostRecord>& posts, TzOffset tz);

/// Reads a JSONL file already produced by `write_posts` (no filtering; any
/// malformed line is fatal).
std::vector<PostRecord> read_posts(const std::filesystem::path& path, TzOffset tz);

struct StockBar {
  Date date;
  double open = 0;
  double close = 0;
  double high = 0;
  double low = 0;
  double volume = 0;
  double change_pct = 0;

  bool operator==(const StockBar&) const = default;
};

struct StockSeries {
  std::string index_name;
  std::vector<StockBar> bars;

  std::size_t size() const { return bars.size(); }
  /// Index of the bar dated `d`, if any.
  std::optional<std::size_t> find(Date d) const;
  /// Index of the first bar dated on or after `d`, if any.
  std::optional<std::size_t> next_on_or_after(Date d) const;
};

/// Reads `date,open,close,high,low,volume,change_pct` (change_pct optional),
/// sorts chronologically and recomputes missing change rates from closes.
StockSeries load_stock_bars(const std::filesystem::path& path);

void write_stock_bars(const std::filesystem::path& path, const StockSeries& series);

}  // namespace sentilag::ingest
