#pragma once

#include "sentilag/dates.hpp"
#include "sentilag/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sentilag::sentiment {

inline constexpr double kDecisionThreshold = 0.5;
inline constexpr std::uint32_t kDefaultHashDims = 1u << 18;

struct SentimentLabel {
  std::string post_id;
  int label = 0;  ///< 1 positive (expects a rise), 0 negative
  double probability = 0.5;

  bool operator==(const SentimentLabel&) const = default;
};

/// Hashed character n-gram vector; indices strictly increasing.
struct SparseVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
  double dot(const std::vector<double>& dense) const;
};

double cosine(const SparseVector& a, const SparseVector& b);

struct FeatureConfig {
  std::uint32_t hash_dims = kDefaultHashDims;
  std::set<int> ngram_orders = {1, 2};
};

/// Counts character (code point) n-grams of each configured order, hashes
/// them into `hash_dims` buckets and L2-normalizes. Throws DomainError on
/// empty text.
SparseVector featurize(std::string_view text, const FeatureConfig& cfg = {});

struct SentimentModel {
  FeatureConfig features;
  std::vector<double> weights;  ///< size == features.hash_dims
  double bias = 0;

  /// Zero weights and bias; scores every text at exactly 0.5.
  static SentimentModel zeros(const FeatureConfig& cfg = {});
};

struct TrainHyper {
  double learning_rate = 1.0;
  int epochs = 200;
  double l2 = 1e-6;
};

struct LabeledText {
  std::string text;
  int label = 0;
};

/// Featurized corpus, reusable across loss/gradient evaluations.
struct Corpus {
  std::vector<SparseVector> x;
  std::vector<int> y;
};

Corpus featurize_corpus(const std::vector<LabeledText>& corpus, const FeatureConfig& cfg);

/// Mean cross-entropy plus (l2/2)·|w|² (bias unregularized).
double classifier_loss(const SentimentModel& m, const Corpus& c, double l2);

/// Gradient of `classifier_loss`; last element is d/d bias.
std::vector<double> classifier_gradient(const SentimentModel& m, const Corpus& c, double l2);

struct TrainResult {
  SentimentModel model;
  std::vector<double> loss_history;  ///< loss before each epoch, then final
};

/// Full-batch gradient descent on the regularized logistic loss from zero
/// initialization. Throws if the corpus lacks either class.
TrainResult train_classifier(const std::vector<LabeledText>& corpus, const TrainHyper& hyper = {},
                             const FeatureConfig& cfg = {});

/// probability = sigmoid(w·x + b), label = probability >= 0.5.
SentimentLabel score(const SentimentModel& model, std::string_view text, std::string post_id = {});

void save_model(const std::filesystem::path& path, const SentimentModel& model);
SentimentModel load_model(const std::filesystem::path& path);

/// `label,text` CSV with header (weibo_senti_100k layout).
std::vector<LabeledText> load_corpus(const std::filesystem::path& path);

/// Label file contract shared with the external transformer scorer.
std::vector<SentimentLabel> ingest_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<SentimentLabel>& labels);

struct DayEntry {
  double value = 0;        ///< Sentiment_d in [0,1]
  std::int64_t posts = 0;  ///< n

  bool operator==(const DayEntry&) const = default;
};

using DailySentimentSeries = std::map<Date, DayEntry>;

enum class AggregateMode { HardLabel, Probability };

struct AggregateResult {
  DailySentimentSeries series;
  std::size_t unlabeled_posts = 0;  ///< posts with no label (excluded)
  std::size_t orphan_labels = 0;    ///< labels whose post_id matched no post
};

/// Per-day mean of labels: Sentiment_d = (sum of Label_i) / n over the posts
/// dated d in `tz`. Days without posts are absent.
AggregateResult daily_aggregate(const std::vector<SentimentLabel>& labels,
                                const std::vector<ingest::PostRecord>& posts, TzOffset tz,
                                AggregateMode mode = AggregateMode::HardLabel);

/// Core of `daily_aggregate` once posts are bucketed by date.
double day_value(const std::vector<int>& labels);

void write_series(const std::filesystem::path& path, const DailySentimentSeries& series);
DailySentimentSeries read_series(const std::filesystem::path& path);

}  // namespace sentilag::sentiment
