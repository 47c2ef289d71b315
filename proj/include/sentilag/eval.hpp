#pragma once

#include "sentilag/dates.hpp"
#include "sentilag/ingest.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sentilag::eval {

/// Positive = "rising or steady".
struct ConfusionMatrix {
  long tp = 0;
  long fn = 0;
  long fp = 0;
  long tn = 0;

  long total() const { return tp + fn + fp + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricsReport {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double accuracy = 0;
  std::optional<double> mse;
  bool precision_undefined = false;  ///< tp + fp == 0
  bool recall_undefined = false;     ///< tp + fn == 0
  bool f1_undefined = false;         ///< precision + recall == 0
};

enum class TrendMode {
  SteadyPositive,  ///< equal counts as rising
  StrictRise,      ///< equal counts as falling
};

struct PricePoint {
  Date date;
  double predicted = 0;
  double actual = 0;
};

struct TrendDay {
  Date date;
  double predicted = 0;
  double actual = 0;
  double prev_actual = 0;
  bool pred_positive = false;
  bool actual_positive = false;
};

struct TrendResult {
  std::vector<TrendDay> days;
  std::size_t dropped = 0;  ///< days lacking a prior actual
};

/// Compares each prediction and actual against the prior day's actual.
/// `prev_actual[k]` empty means unavailable (day dropped).
TrendResult trend_labels(std::span<const PricePoint> pred, std::span<const std::optional<double>> prev_actual,
                         TrendMode mode = TrendMode::SteadyPositive);

/// Looks the prior trading day's open up in `stock`.
TrendResult trend_labels(std::span<const PricePoint> pred, const ingest::StockSeries& stock,
                         TrendMode mode = TrendMode::SteadyPositive);

ConfusionMatrix confusion(std::span<const bool> pred_positive, std::span<const bool> actual_positive);
ConfusionMatrix confusion(const TrendResult& trends);

/// Throws DomainError on an empty matrix. Zero denominators give 0 and set
/// the matching flag.
MetricsReport metrics(const ConfusionMatrix& m);

double mse(std::span<const double> pred, std::span<const double> actual);

/// precision_a / precision_b - 1; empty when precision_b is 0.
std::optional<double> precision_gap(const MetricsReport& a, const MetricsReport& b);

}  // namespace sentilag::eval
