#include "sentilag/eval.hpp"

#include "sentilag/error.hpp"

namespace sentilag::eval {

namespace {

bool positive(double next, double prev, TrendMode mode) {
  return mode == TrendMode::SteadyPositive ? next >= prev : next > prev;
}

}  // namespace

TrendResult trend_labels(std::span<const PricePoint> pred, std::span<const std::optional<double>> prev_actual,
                         TrendMode mode) {
  if (pred.size() != prev_actual.size()) {
    throw DomainError("trend_labels: predictions and prior actuals differ in length");
  }
  TrendResult out;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (!prev_actual[k]) {
      ++out.dropped;
      continue;
    }
    TrendDay d;
    d.date = pred[k].date;
    d.predicted = pred[k].predicted;
    d.actual = pred[k].actual;
    d.prev_actual = *prev_actual[k];
    d.pred_positive = positive(d.predicted, d.prev_actual, mode);
    d.actual_positive = positive(d.actual, d.prev_actual, mode);
    out.days.push_back(d);
  }
  return out;
}

TrendResult trend_labels(std::span<const PricePoint> pred, const ingest::StockSeries& stock, TrendMode mode) {
  std::vector<std::optional<double>> prev(pred.size());
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const auto idx = stock.find(pred[k].date);
    if (idx && *idx > 0) {
      prev[k] = stock.bars[*idx - 1].open;
    }
  }
  return trend_labels(pred, prev, mode);
}

ConfusionMatrix confusion(std::span<const bool> pred_positive, std::span<const bool> actual_positive) {
  if (pred_positive.size() != actual_positive.size()) {
    throw DomainError("confusion: length mismatch");
  }
  ConfusionMatrix m;
  for (std::size_t k = 0; k < pred_positive.size(); ++k) {
    if (actual_positive[k]) {
      ++(pred_positive[k] ? m.tp : m.fn);
    } else {
      ++(pred_positive[k] ? m.fp : m.tn);
    }
  }
  return m;
}

ConfusionMatrix confusion(const TrendResult& trends) {
  ConfusionMatrix m;
  for (const auto& d : trends.days) {
    if (d.actual_positive) {
      ++(d.pred_positive ? m.tp : m.fn);
    } else {
      ++(d.pred_positive ? m.fp : m.tn);
    }
  }
  return m;
}

MetricsReport metrics(const ConfusionMatrix& m) {
  if (m.tp < 0 || m.fn < 0 || m.fp < 0 || m.tn < 0) {
    throw DomainError("confusion matrix cells must be non-negative");
  }
  if (m.total() == 0) {
    throw DomainError("metrics of an empty confusion matrix");
  }
  MetricsReport r;
  const auto tp = static_cast<double>(m.tp);
  if (m.tp + m.fp == 0) {
    r.precision_undefined = true;
  } else {
    r.precision = tp / static_cast<double>(m.tp + m.fp);
  }
  if (m.tp + m.fn == 0) {
    r.recall_undefined = true;
  } else {
    r.recall = tp / static_cast<double>(m.tp + m.fn);
  }
  if (r.precision + r.recall == 0) {
    r.f1_undefined = true;
  } else {
    r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  }
  r.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
  return r;
}

double mse(std::span<const double> pred, std::span<const double> actual) {
  if (pred.size() != actual.size()) {
    throw DomainError("mse: length mismatch");
  }
  if (pred.empty()) {
    throw DomainError("mse of empty series");
  }
  double s = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double d = pred[k] - actual[k];
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

std::optional<double> precision_gap(const MetricsReport& a, const MetricsReport& b) {
  if (b.precision == 0) {
    return std::nullopt;
  }
  return a.precision / b.precision - 1.0;
}

}  // namespace sentilag::eval
