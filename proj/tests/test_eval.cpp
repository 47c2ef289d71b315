#include "sentilag/error.hpp"
#include "sentilag/eval.hpp"

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

using namespace sentilag;
using namespace sentilag::eval;

namespace {

const ConfusionMatrix kAfa{119, 20, 13, 103};
const ConfusionMatrix kUfa{181, 115, 99, 172};

// Day-level outcomes that replay a confusion matrix.
void replay(const ConfusionMatrix& m, std::vector<char>& pred, std::vector<char>& actual) {
  auto push = [&](long n, bool p, bool a) {
    for (long k = 0; k < n; ++k) {
      pred.push_back(p);
      actual.push_back(a);
    }
  };
  push(m.tp, true, true);
  push(m.fn, false, true);
  push(m.fp, true, false);
  push(m.tn, false, false);
}

ConfusionMatrix tally(const std::vector<char>& pred, const std::vector<char>& actual) {
  auto pb = std::make_unique<bool[]>(pred.size());
  auto ab = std::make_unique<bool[]>(actual.size());
  std::copy(pred.begin(), pred.end(), pb.get());
  std::copy(actual.begin(), actual.end(), ab.get());
  return confusion(std::span<const bool>(pb.get(), pred.size()), std::span<const bool>(ab.get(), actual.size()));
}

}  // namespace

TEST(Trend, RisingSteadyFalling) {
  const std::vector<PricePoint> pts = {{Date{1}, 100.0, 99.5}, {Date{2}, 99.0, 99.0}, {Date{3}, 98.0, 100.0}};
  const std::vector<std::optional<double>> prev = {99.0, 99.0, 99.0};
  const auto t = trend_labels(pts, prev);
  ASSERT_EQ(t.days.size(), 3u);
  EXPECT_TRUE(t.days[0].pred_positive);
  EXPECT_TRUE(t.days[1].pred_positive);
  EXPECT_TRUE(t.days[1].actual_positive);
  EXPECT_FALSE(t.days[2].pred_positive);
  EXPECT_TRUE(t.days[2].actual_positive);
  const auto strict = trend_labels(pts, prev, TrendMode::StrictRise);
  EXPECT_FALSE(strict.days[1].pred_positive);
}

TEST(Trend, MissingPriorDayDropped) {
  const auto dates = sentilag::testing::weekdays(Date::from_ymd(2018, 1, 1), 4);
  const auto stock = sentilag::testing::bars_from_returns(dates, {0, 0.01, -0.01, 0.02});
  const std::vector<PricePoint> pts = {{dates[0], 1, 1}, {dates[2], stock.bars[1].open + 1, stock.bars[2].open},
                                       {Date::from_ymd(2018, 1, 6), 1, 1}};
  const auto t = trend_labels(pts, stock);
  EXPECT_EQ(t.dropped, 2u);
  ASSERT_EQ(t.days.size(), 1u);
  EXPECT_EQ(t.days[0].prev_actual, stock.bars[1].open);
  EXPECT_TRUE(t.days[0].pred_positive);
  EXPECT_THROW(trend_labels(pts, std::vector<std::optional<double>>{1.0}), DomainError);
}

TEST(Confusion, PerfectPredictor) {
  std::vector<char> p = {1, 1, 1, 1, 1, 1, 0, 0, 0, 0};
  EXPECT_EQ(tally(p, p), (ConfusionMatrix{6, 0, 0, 4}));
}

TEST(Confusion, ReplaysTableOne) {
  std::vector<char> pred, actual;
  replay(kAfa, pred, actual);
  EXPECT_EQ(tally(pred, actual), kAfa);
  pred.clear();
  actual.clear();
  replay(kUfa, pred, actual);
  EXPECT_EQ(tally(pred, actual), kUfa);
}

TEST(Confusion, MatchesBruteForceAndRejectsMismatch) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<char> p(rng() % 50), a(p.size());
    ConfusionMatrix expect;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = rng() % 2;
      a[i] = rng() % 2;
      if (p[i] && a[i]) ++expect.tp;
      if (!p[i] && a[i]) ++expect.fn;
      if (p[i] && !a[i]) ++expect.fp;
      if (!p[i] && !a[i]) ++expect.tn;
    }
    EXPECT_EQ(tally(p, a), expect);
  }
  const bool x[2] = {true, false};
  EXPECT_THROW(confusion(std::span<const bool>(x, 2), std::span<const bool>(x, 1)), DomainError);
}

TEST(Metrics, TableOneValues) {
  const auto a = metrics(kAfa);
  const auto u = metrics(kUfa);
  EXPECT_NEAR(a.precision, 0.9015, 1e-4);
  EXPECT_NEAR(u.precision, 0.6464, 1e-4);
  EXPECT_NEAR(a.accuracy, 0.8706, 1e-4);
  EXPECT_NEAR(u.accuracy, 0.6226, 1e-4);
  EXPECT_EQ(a.accuracy, 222.0 / 255.0);
  EXPECT_EQ(u.accuracy, 353.0 / 567.0);
  EXPECT_EQ(std::lround(a.accuracy * 100), 87);
  EXPECT_EQ(std::lround(u.accuracy * 100), 62);
  EXPECT_NEAR(*precision_gap(a, u), 0.3946, 1e-4);
  EXPECT_NEAR(a.f1, 2 * a.precision * a.recall / (a.precision + a.recall), 1e-15);
  EXPECT_NEAR(a.f1, 0.878, 1e-3);
  EXPECT_NEAR(u.f1, 0.628, 1e-3);
}

TEST(Metrics, DegenerateCellsFlagged) {
  const auto m = metrics(ConfusionMatrix{0, 3, 0, 5});
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_TRUE(m.precision_undefined);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_FALSE(m.recall_undefined);
  EXPECT_EQ(m.f1, 0.0);
  EXPECT_TRUE(m.f1_undefined);
  EXPECT_THROW(metrics(ConfusionMatrix{}), DomainError);
  EXPECT_THROW(metrics(ConfusionMatrix{-1, 1, 1, 1}), DomainError);
  EXPECT_FALSE(precision_gap(metrics(kAfa), m).has_value());
}

TEST(Metrics, RangesComplementAndF1Zero) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 1000; ++trial) {
    ConfusionMatrix c{static_cast<long>(rng() % 5), static_cast<long>(rng() % 5), static_cast<long>(rng() % 5),
                      static_cast<long>(rng() % 5)};
    if (c.total() == 0) {
      continue;
    }
    const auto m = metrics(c);
    for (double v : {m.precision, m.recall, m.f1, m.accuracy}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(m.f1 == 0.0, c.tp == 0);
    // negative class as positive: tp<->tn, fp<->fn
    const auto flip = metrics(ConfusionMatrix{c.tn, c.fp, c.fn, c.tp});
    EXPECT_EQ(flip.accuracy, m.accuracy);
    if (c.tn + c.fn > 0) {
      EXPECT_DOUBLE_EQ(flip.precision, static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fn));
    }
    if (c.tn + c.fp > 0) {
      EXPECT_DOUBLE_EQ(flip.recall, static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp));
    }
  }
}

TEST(Mse, ExamplesAndOracle) {
  const std::vector<double> a = {1, 2}, b = {2, 4};
  EXPECT_EQ(mse(a, a), 0.0);
  EXPECT_EQ(mse(a, b), 2.5);
  EXPECT_THROW(mse(a, std::vector<double>{1}), DomainError);
  EXPECT_THROW(mse(std::vector<double>{}, std::vector<double>{}), DomainError);
  std::mt19937_64 rng(15);
  std::normal_distribution<double> g(0, 100);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> p(1 + rng() % 300), q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = g(rng);
      q[i] = g(rng);
    }
    const double ref = sentilag::testing::mse_oracle(p, q);
    EXPECT_NEAR(mse(p, q), ref, 1e-12 * std::max(1.0, ref));
  }
}
