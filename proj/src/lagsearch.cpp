#include "sentilag/lagsearch.hpp"

#include "sentilag/csv.hpp"
#include "sentilag/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sentilag::lagsearch {

std::string to_string(TargetColumn t) {
  switch (t) {
    case TargetColumn::Open: return "open";
    case TargetColumn::Close: return "close";
    case TargetColumn::ChangePct: return "change_pct";
  }
  return "?";
}

TargetColumn parse_target(const std::string& s) {
  if (s == "open") return TargetColumn::Open;
  if (s == "close") return TargetColumn::Close;
  if (s == "change_pct") return TargetColumn::ChangePct;
  throw Error("unknown target column '" + s + "' (open|close|change_pct)");
}

std::string to_string(FillPolicy f) {
  switch (f) {
    case FillPolicy::Drop: return "drop";
    case FillPolicy::CarryForward: return "carry-forward";
    case FillPolicy::Neutral: return "neutral";
  }
  return "?";
}

FillPolicy parse_fill(const std::string& s) {
  if (s == "drop") return FillPolicy::Drop;
  if (s == "carry-forward" || s == "carry_forward") return FillPolicy::CarryForward;
  if (s == "neutral") return FillPolicy::Neutral;
  throw Error("unknown fill policy '" + s + "' (drop|carry-forward|neutral)");
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DomainError("pearson: length mismatch " + std::to_string(x.size()) + " vs " +
                      std::to_string(y.size()));
  }
  if (x.size() < 3) {
    throw DomainError("pearson: need at least 3 points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0;
  double my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) {
    throw DomainError("pearson: constant series");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

TradingSentiment to_trading_days(const sentiment::DailySentimentSeries& s, const ingest::StockSeries& stock,
                                 FillPolicy fill) {
  const std::size_t n = stock.size();
  TradingSentiment out;
  out.value.assign(n, std::nullopt);
  out.posts.assign(n, 0);
  std::vector<double> weighted(n, 0.0);
  std::optional<std::size_t> first;
  std::optional<std::size_t> last;
  for (const auto& [date, entry] : s) {
    const auto idx = stock.next_on_or_after(date);
    if (!idx) {
      continue;  // after the last bar
    }
    weighted[*idx] += entry.value * static_cast<double>(entry.posts);
    out.posts[*idx] += entry.posts;
    if (!first) first = idx;
    last = idx;
  }
  if (!first) {
    return out;
  }
  std::optional<double> carry;
  for (std::size_t i = *first; i <= *last; ++i) {
    if (out.posts[i] > 0) {
      out.value[i] = weighted[i] / static_cast<double>(out.posts[i]);
      carry = out.value[i];
    } else if (fill == FillPolicy::Neutral) {
      out.value[i] = kNeutralSentiment;
    } else if (fill == FillPolicy::CarryForward) {
      out.value[i] = carry;
    }
  }
  return out;
}

double target_value(const ingest::StockBar& bar, TargetColumn target) {
  switch (target) {
    case TargetColumn::Open: return bar.open;
    case TargetColumn::Close: return bar.close;
    case TargetColumn::ChangePct: return bar.change_pct;
  }
  return 0;
}

AlignedPairs shift_align(const TradingSentiment& ts, const ingest::StockSeries& stock, int T,
                         TargetColumn target) {
  if (T < 0) {
    throw DomainError("shift must be non-negative");
  }
  AlignedPairs out;
  const auto shift = static_cast<std::size_t>(T);
  for (std::size_t i = 0; i + shift < stock.size() && i < ts.value.size(); ++i) {
    if (!ts.value[i]) {
      continue;
    }
    out.sentiment.push_back(*ts.value[i]);
    out.target.push_back(target_value(stock.bars[i + shift], target));
    out.sentiment_dates.push_back(stock.bars[i].date);
    out.target_dates.push_back(stock.bars[i + shift].date);
  }
  if (out.size() == 0) {
    throw DomainError("no overlap between sentiment and stock at T=" + std::to_string(T));
  }
  return out;
}

AlignedPairs shift_align(const sentiment::DailySentimentSeries& s, const ingest::StockSeries& stock, int T,
                         TargetColumn target, FillPolicy fill) {
  return shift_align(to_trading_days(s, stock, fill), stock, T, target);
}

LagSearchResult search_lag(const sentiment::DailySentimentSeries& s, const ingest::StockSeries& stock,
                           const LagSearchOptions& opts) {
  if (opts.t_min < 0 || opts.t_min > opts.t_max) {
    throw DomainError("invalid lag range [" + std::to_string(opts.t_min) + ", " + std::to_string(opts.t_max) +
                      "]");
  }
  const TradingSentiment ts = to_trading_days(s, stock, opts.fill);
  LagSearchResult out;
  out.target = opts.target;
  bool found = false;
  double best_score = 0;
  for (int T = opts.t_min; T <= opts.t_max; ++T) {
    double r = 0;
    try {
      const AlignedPairs pairs = shift_align(ts, stock, T, opts.target);
      r = pearson(pairs.sentiment, pairs.target);
      out.pairs[T] = pairs.size();
    } catch (const DomainError& e) {
      out.skipped[T] = e.what();
      continue;
    }
    out.correlations[T] = r;
    const double score = opts.use_abs ? std::abs(r) : r;
    if (!found || score > best_score) {
      found = true;
      best_score = score;
      out.best_T = T;
      out.best_r = r;
    }
  }
  if (!found) {
    throw DomainError("lag search: no T in range produced a defined correlation");
  }
  return out;
}

void write_lag_csv(const std::filesystem::path& path, const LagSearchResult& r) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << "T,r,pairs\n";
  for (const auto& [T, corr] : r.correlations) {
    out << T << ',' << csv::number(corr) << ',' << r.pairs.at(T) << '\n';
  }
}

}  // namespace sentilag::lagsearch
