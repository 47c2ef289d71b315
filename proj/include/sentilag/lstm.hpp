#pragma once

#include "sentilag/dates.hpp"
#include "sentilag/ingest.hpp"
#include "sentilag/lagsearch.hpp"
#include "sentilag/sentiment.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace sentilag::lstm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kInputSize = 2;  // (open, lagged sentiment)

/// Min-max scaling to [0,1]; a degenerate range only shifts.
struct MinMax {
  double min = 0;
  double max = 1;

  static MinMax fit(const std::vector<double>& xs);
  double scale() const { return max > min ? max - min : 1.0; }
  double normalize(double x) const { return (x - min) / scale(); }
  double denormalize(double z) const { return z * scale() + min; }
};

struct SequenceRow {
  Date date;
  double open = 0;
  double sentiment = 0;
  std::size_t trading_index = 0;  ///< position in the stock calendar
};

/// Sliding windows over aligned rows. Window w reads rows
/// [start, start + lookback) and predicts the open of row start + lookback.
/// Row start - 1 must exist and every row of the span must be consecutive in
/// the trading calendar.
struct SequenceDataset {
  std::vector<SequenceRow> rows;
  Matrix features;             ///< kInputSize x rows, normalized
  std::vector<double> target;  ///< normalized open per row
  std::array<MinMax, kInputSize> norm;  ///< fitted on rows [0, split_point)
  int lookback = 20;
  int lag = 0;
  std::size_t split_point = 0;
  std::vector<std::size_t> train_windows;  ///< window start rows, chronological
  std::vector<std::size_t> test_windows;

  std::size_t target_row(std::size_t start) const { return start + static_cast<std::size_t>(lookback); }
  /// 2 x lookback normalized inputs of one window.
  Matrix window(std::size_t start) const;
};

/// Feature at day d = (open_d, Sentiment_{d-T}); target = open_{d+1}; split
/// is chronological at floor(split * rows).
SequenceDataset build_dataset(const ingest::StockSeries& stock, const sentiment::DailySentimentSeries& s, int T,
                              int lookback, double split = 0.6,
                              lagsearch::FillPolicy fill = lagsearch::FillPolicy::Neutral);

/// Same windowing over caller-supplied rows (already lag-aligned).
SequenceDataset build_dataset(std::vector<SequenceRow> rows, int lookback, double split = 0.6, int lag = 0);

struct LayerParams {
  Matrix W;  ///< 4H x input; gate row blocks ordered input, forget, output, candidate
  Matrix U;  ///< 4H x H
  Vector b;  ///< 4H
};

struct LstmModel {
  int input_size = kInputSize;
  int hidden = 128;
  double dropout = 0.001;  ///< applied to layer-1 outputs while training
  std::array<LayerParams, 2> layers;
  Vector head_w;
  double head_b = 0;

  static LstmModel zeros(int input_size, int hidden, double dropout = 0.001);
  /// Uniform(-1/sqrt(H), 1/sqrt(H)) weights, forget-gate bias 1.
  static LstmModel init(int input_size, int hidden, std::uint64_t seed, double dropout = 0.001);

  std::size_t parameter_count() const;
  bool all_finite() const;
};

/// Calls f(Eigen::Map<Vector>) for every parameter tensor in a fixed order:
/// W, U, b of layer 1, then layer 2, then head weights and head bias.
template <class Model, class F>
void visit_params(Model& m, F&& f) {
  for (auto& layer : m.layers) {
    f(Eigen::Map<Vector>(layer.W.data(), layer.W.size()));
    f(Eigen::Map<Vector>(layer.U.data(), layer.U.size()));
    f(Eigen::Map<Vector>(layer.b.data(), layer.b.size()));
  }
  f(Eigen::Map<Vector>(m.head_w.data(), m.head_w.size()));
  f(Eigen::Map<Vector>(&m.head_b, 1));
}

struct CellState {
  Vector h;
  Vector c;
};

/// One step of the gated cell: i, f, o sigmoid gates, g tanh candidate,
/// c' = f*c + i*g, h' = o*tanh(c'). Throws on non-finite input.
CellState lstm_cell_forward(const LayerParams& p, const Vector& x, const Vector& h, const Vector& c);

/// Runs one layer over a sequence (columns of `inputs`), returning the hidden
/// output at every step (H x L).
Matrix layer_forward(const LayerParams& p, const Matrix& inputs);

/// Evaluation-mode prediction (normalized) for one kInputSize x L window.
double forward(const LstmModel& m, const Matrix& window, int lookback);

/// Inputs for a batch: one (input x batch) matrix per time step.
using BatchSequence = std::vector<Matrix>;

/// Mean squared error over a batch plus its gradient. When `rng` is non-null,
/// dropout masks are drawn from it (training mode).
double loss_and_gradient(const LstmModel& m, const BatchSequence& inputs, const Vector& targets,
                         LstmModel& grad, std::mt19937_64* rng = nullptr);

/// Batched evaluation-mode predictions.
Vector predict_batch(const LstmModel& m, const BatchSequence& inputs);

enum class OptimizerKind { Adam, Sgd };

std::string to_string(OptimizerKind k);
OptimizerKind parse_optimizer(const std::string& s);

struct TrainConfig {
  int batch_size = 64;
  int epochs = 100;
  double learning_rate = 1e-3;
  std::uint64_t seed = 7;
  int lookback = 20;
  int hidden = 128;
  double dropout = 0.001;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam or plain SGD over the flattened parameter set.
class Optimizer {
 public:
  Optimizer(const LstmModel& shape, const TrainConfig& cfg);
  void step(LstmModel& m, LstmModel& grad);

 private:
  TrainConfig cfg_;
  LstmModel m1_;
  LstmModel m2_;
  long t_ = 0;
};

struct EpochLoss {
  double train = 0;  ///< mean training-mode batch loss over the epoch
  double test = 0;  ///< NaN when the test split is empty
};

struct TrainResult {
  LstmModel model;
  std::vector<EpochLoss> history;
};

/// Mini-batch BPTT with seeded shuffling. Throws Error if the loss becomes
/// non-finite.
TrainResult train(LstmModel model, const SequenceDataset& ds, const TrainConfig& cfg);

/// Convenience: initializes from cfg.seed and trains.
TrainResult train(const SequenceDataset& ds, const TrainConfig& cfg);

double split_mse(const LstmModel& m, const SequenceDataset& ds, const std::vector<std::size_t>& windows);

enum class Split { Train, Test };

struct Prediction {
  Date date;
  double predicted = 0;
  double actual = 0;
  double predicted_norm = 0;
  double actual_norm = 0;
};

std::vector<Prediction> predict_series(const LstmModel& m, const SequenceDataset& ds, Split which);

struct Checkpoint {
  LstmModel model;
  std::array<MinMax, kInputSize> norm;
  TrainConfig config;
  int lag = 0;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sentilag::lstm
