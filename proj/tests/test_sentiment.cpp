#include "sentilag/error.hpp"
#include "sentilag/sentiment.hpp"

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace sentilag;
using namespace sentilag::sentiment;
using sentilag::testing::TempDir;
using sentilag::testing::write_text;

namespace {

std::vector<LabeledText> toy_corpus() {
  std::vector<LabeledText> c;
  for (int i = 0; i < 50; ++i) {
    c.push_back({"good", 1});
    c.push_back({"bad", 0});
  }
  return c;
}

ingest::PostRecord post_at(std::string id, const std::string& when) {
  ingest::PostRecord p;
  p.post_id = std::move(id);
  p.user_id = "u";
  p.text = "x";
  p.created_at = Timestamp::parse(when, TzOffset{});
  return p;
}

}  // namespace

TEST(Featurize, SingleUnigram) {
  FeatureConfig cfg;
  cfg.ngram_orders = {1};
  const auto v = featurize("aa", cfg);
  ASSERT_EQ(v.nnz(), 1u);
  EXPECT_DOUBLE_EQ(v.value[0], 1.0);
}

TEST(Featurize, DeterministicAndNormalized) {
  const auto a = featurize("恒生指数今天大涨");
  const auto b = featurize("恒生指数今天大涨");
  EXPECT_EQ(a.index, b.index);
  EXPECT_EQ(a.value, b.value);
  double sq = 0;
  for (double x : a.value) {
    sq += x * x;
  }
  EXPECT_NEAR(sq, 1.0, 1e-12);
  EXPECT_TRUE(std::is_sorted(a.index.begin(), a.index.end()));
}

TEST(Featurize, RelatedWordsAreNotIdentical) {
  // unigrams {大,涨} vs {大,跌}, bigrams differ: one shared feature of three each
  const double c = cosine(featurize("大涨"), featurize("大跌"));
  EXPECT_LT(c, 1.0);
  EXPECT_NEAR(c, 1.0 / 3.0, 1e-12);
}

TEST(Featurize, Preconditions) {
  EXPECT_THROW(featurize(""), DomainError);
  FeatureConfig bad;
  bad.hash_dims = 1;
  EXPECT_THROW(featurize("x", bad), DomainError);
  bad.hash_dims = 1000;  // not a power of two
  EXPECT_THROW(featurize("x", bad), DomainError);
}

TEST(Classifier, ZeroModelScoresHalf) {
  const auto m = SentimentModel::zeros();
  const auto s = score(m, "任何文本");
  EXPECT_EQ(s.probability, 0.5);
  EXPECT_EQ(s.label, 1);
}

TEST(Classifier, SeparableCorpusFitsExactly) {
  const auto r = train_classifier(toy_corpus());
  EXPECT_EQ(score(r.model, "good").label, 1);
  EXPECT_EQ(score(r.model, "bad").label, 0);
  EXPECT_NEAR(r.loss_history.front(), std::log(2.0), 1e-15);
  const auto a = score(r.model, "good");
  const auto b = score(r.model, "good");
  EXPECT_EQ(a.probability, b.probability);
  EXPECT_GT(a.probability, 0.0);
  EXPECT_LT(a.probability, 1.0);
}

TEST(Classifier, SingleClassRejected) {
  EXPECT_THROW(train_classifier({{"a", 1}, {"b", 1}}), DomainError);
}

TEST(Classifier, GradientMatchesFiniteDifferences) {
  FeatureConfig cfg;
  cfg.hash_dims = 64;
  const auto corpus = featurize_corpus({{"大涨了", 1}, {"大跌了", 0}, {"看涨", 1}, {"熊市", 0}, {"up", 1}}, cfg);
  auto m = SentimentModel::zeros(cfg);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& w : m.weights) {
    w = u(rng);
  }
  m.bias = 0.1;
  const double l2 = 1e-3;
  const auto g = classifier_gradient(m, corpus, l2);
  ASSERT_EQ(g.size(), m.weights.size() + 1);
  const double h = 1e-6;
  for (std::size_t k = 0; k <= m.weights.size(); ++k) {
    double& slot = k < m.weights.size() ? m.weights[k] : m.bias;
    const double saved = slot;
    slot = saved + h;
    const double up = classifier_loss(m, corpus, l2);
    slot = saved - h;
    const double down = classifier_loss(m, corpus, l2);
    slot = saved;
    EXPECT_NEAR(g[k], (up - down) / (2 * h), 1e-8) << k;
  }
}

TEST(Classifier, LossNonIncreasingAtSmallStep) {
  std::mt19937_64 rng(9);
  const std::vector<std::string> words = {"涨", "跌", "好", "坏", "牛", "熊", "买", "卖"};
  std::vector<LabeledText> corpus;
  for (int i = 0; i < 200; ++i) {
    std::string t;
    for (int k = 0; k < 4; ++k) {
      t += words[rng() % words.size()];
    }
    corpus.push_back({t, static_cast<int>(rng() % 2)});  // labels unrelated to text
  }
  TrainHyper h;
  h.learning_rate = 0.05;
  h.epochs = 50;
  const auto r = train_classifier(corpus, h);
  for (std::size_t i = 1; i < r.loss_history.size(); ++i) {
    EXPECT_LE(r.loss_history[i], r.loss_history[i - 1]);
  }
}

TEST(Classifier, SaveLoadRoundTrip) {
  TempDir dir("model");
  const auto r = train_classifier(toy_corpus());
  save_model(dir / "m.json", r.model);
  const auto back = load_model(dir / "m.json");
  EXPECT_EQ(back.weights, r.model.weights);
  EXPECT_EQ(back.bias, r.model.bias);
  EXPECT_EQ(back.features.ngram_orders, r.model.features.ngram_orders);
  EXPECT_EQ(score(back, "good").probability, score(r.model, "good").probability);
}

TEST(Corpus, LoadsLabelTextCsv) {
  TempDir dir("corpus");
  write_text(dir / "c.csv", "label,review\n1,好，很好\n0,差\n");
  const auto c = load_corpus(dir / "c.csv");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].text, "好，很好");
  EXPECT_EQ(c[1].label, 0);
  write_text(dir / "bad.csv", "label,review\n2,x\n");
  EXPECT_THROW(load_corpus(dir / "bad.csv"), FormatError);
}

TEST(Labels, ValidRecordParses) {
  TempDir dir("labels");
  write_text(dir / "l.jsonl", R"({"post_id":"p1","label":1,"probability":0.93})"
                              "\n");
  const auto l = ingest_labels(dir / "l.jsonl");
  ASSERT_EQ(l.size(), 1u);
  EXPECT_EQ(l[0].post_id, "p1");
  EXPECT_EQ(l[0].label, 1);
  EXPECT_EQ(l[0].probability, 0.93);
}

TEST(Labels, DomainViolationsAreFatalWithLine) {
  TempDir dir("labels");
  const std::string ok = R"({"post_id":"p1","label":1,"probability":0.9})"
                         "\n";
  for (const std::string bad : {R"({"post_id":"p2","label":2,"probability":0.9})",
                                R"({"post_id":"p2","label":1,"probability":1.5})",
                                R"({"post_id":"p2","label":1,"probability":-0.1})",
                                R"({"post_id":"p1","label":1,"probability":0.9})", R"({"post_id":"p2"})"}) {
    write_text(dir / "l.jsonl", ok + bad + "\n");
    try {
      ingest_labels(dir / "l.jsonl");
      FAIL() << bad;
    } catch (const FormatError& e) {
      EXPECT_EQ(e.line(), 2) << bad;
    }
  }
}

TEST(Labels, AdapterStyleFileRoundTrips) {
  // 100-post fixture in the adapter's output format
  TempDir dir("labels");
  std::mt19937_64 rng(100);
  std::vector<SentimentLabel> labels;
  for (int i = 0; i < 100; ++i) {
    const double p = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    labels.push_back({"post-" + std::to_string(i), p >= kDecisionThreshold ? 1 : 0, p});
  }
  labels[0].probability = 0.5;
  labels[0].label = 1;
  write_labels(dir / "labels.jsonl", labels);
  const auto back = ingest_labels(dir / "labels.jsonl");
  EXPECT_EQ(back, labels);
}

TEST(Aggregate, EquationOneExamples) {
  EXPECT_DOUBLE_EQ(day_value({1, 1, 0}), 2.0 / 3.0);
  EXPECT_EQ(day_value({1, 1, 1}), 1.0);
  EXPECT_EQ(day_value({0, 0}), 0.0);
  EXPECT_THROW(day_value({}), DomainError);
}

TEST(Aggregate, MatchesOracleOnRandomSets) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> labels(1 + rng() % 200);
    for (auto& l : labels) {
      l = static_cast<int>(rng() % 2);
    }
    const double v = day_value(labels);
    EXPECT_EQ(v, sentilag::testing::day_mean_oracle(labels));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Aggregate, GroupsByLocalDate) {
  const std::vector<ingest::PostRecord> posts = {
      post_at("a", "2018-01-02T10:00:00+08:00"), post_at("b", "2018-01-02T23:00:00+08:00"),
      post_at("c", "2018-01-02T17:00:00Z"),  // 01:00 next day local
      post_at("d", "2018-01-05T10:00:00+08:00")};
  const std::vector<SentimentLabel> labels = {{"a", 1, 0.9}, {"b", 0, 0.2}, {"c", 1, 0.7}, {"zz", 1, 0.8}};
  const auto r = daily_aggregate(labels, posts, TzOffset{});
  ASSERT_EQ(r.series.size(), 2u);
  EXPECT_EQ(r.series.at(Date::from_ymd(2018, 1, 2)), (DayEntry{0.5, 2}));
  EXPECT_EQ(r.series.at(Date::from_ymd(2018, 1, 3)), (DayEntry{1.0, 1}));
  EXPECT_EQ(r.unlabeled_posts, 1u);
  EXPECT_EQ(r.orphan_labels, 1u);
  const auto pr = daily_aggregate(labels, posts, TzOffset{}, AggregateMode::Probability);
  EXPECT_NEAR(pr.series.at(Date::from_ymd(2018, 1, 2)).value, 0.55, 1e-15);
}

TEST(Aggregate, PermutationInvariantAndUnionOfDisjointDays) {
  std::mt19937_64 rng(12);
  std::vector<ingest::PostRecord> posts;
  std::vector<SentimentLabel> labels;
  for (int i = 0; i < 300; ++i) {
    const int day = static_cast<int>(rng() % 20);
    auto p = post_at("p" + std::to_string(i), "2018-03-01T12:00:00+08:00");
    p.created_at.seconds += 86400LL * day;
    posts.push_back(p);
    labels.push_back({p.post_id, static_cast<int>(rng() % 2), 0.5});
  }
  const auto base = daily_aggregate(labels, posts, TzOffset{}).series;
  auto shuffled_posts = posts;
  auto shuffled_labels = labels;
  std::shuffle(shuffled_posts.begin(), shuffled_posts.end(), rng);
  std::shuffle(shuffled_labels.begin(), shuffled_labels.end(), rng);
  EXPECT_EQ(daily_aggregate(shuffled_labels, shuffled_posts, TzOffset{}).series, base);

  const Date cut = Date::from_ymd(2018, 3, 10);
  std::vector<ingest::PostRecord> early, late;
  for (const auto& p : posts) {
    (p.created_at.local_date(TzOffset{}) < cut ? early : late).push_back(p);
  }
  auto merged = daily_aggregate(labels, early, TzOffset{}).series;
  for (const auto& [d, e] : daily_aggregate(labels, late, TzOffset{}).series) {
    ASSERT_TRUE(merged.emplace(d, e).second);
  }
  EXPECT_EQ(merged, base);
}

TEST(Aggregate, SeriesFileRoundTrip) {
  TempDir dir("series");
  DailySentimentSeries s;
  s[Date::from_ymd(2018, 1, 2)] = {2.0 / 3.0, 3};
  s[Date::from_ymd(2018, 1, 9)] = {0.1, 10};
  write_series(dir / "s.csv", s);
  EXPECT_EQ(read_series(dir / "s.csv"), s);
}
