#include "sentilag/lstm.hpp"

#include "sentilag/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace sentilag::lstm {

using json = nlohmann::json;

namespace {

// Portable uniform double in [0, 1) from the raw engine output.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vector sigmoid(const Vector& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

// Activations of one layer over a whole batch. Every matrix stores the time
// steps as consecutive column blocks of width `batch`.
struct LayerCache {
  Eigen::Index batch = 0;
  std::size_t steps = 0;
  Matrix x;  // input x (steps*batch)
  Matrix i, f, o, g, c, tc, h;

  auto step(const Matrix& m, std::size_t t) const {
    return m.middleCols(static_cast<Eigen::Index>(t) * batch, batch);
  }
};

void layer_forward_batch(const LayerParams& p, Matrix x, std::size_t steps, LayerCache& cache) {
  const Eigen::Index hidden = p.U.cols();
  const Eigen::Index batch = x.cols() / static_cast<Eigen::Index>(steps);
  const Eigen::Index cols = x.cols();
  cache.batch = batch;
  cache.steps = steps;
  Matrix z = p.W * x;
  z.colwise() += p.b;
  cache.x = std::move(x);
  for (auto* m : {&cache.i, &cache.f, &cache.o, &cache.g, &cache.c, &cache.tc, &cache.h}) {
    m->resize(hidden, cols);
  }
  for (std::size_t t = 0; t < steps; ++t) {
    const Eigen::Index off = static_cast<Eigen::Index>(t) * batch;
    auto zt = z.middleCols(off, batch);
    if (t > 0) {
      zt.noalias() += p.U * cache.h.middleCols(off - batch, batch);
    }
    cache.i.middleCols(off, batch) = (1.0 + (-zt.topRows(hidden).array()).exp()).inverse().matrix();
    cache.f.middleCols(off, batch) = (1.0 + (-zt.middleRows(hidden, hidden).array()).exp()).inverse().matrix();
    cache.o.middleCols(off, batch) = (1.0 + (-zt.middleRows(2 * hidden, hidden).array()).exp()).inverse().matrix();
    cache.g.middleCols(off, batch) = zt.bottomRows(hidden).array().tanh().matrix();
    if (t > 0) {
      cache.c.middleCols(off, batch) =
          (cache.f.middleCols(off, batch).array() * cache.c.middleCols(off - batch, batch).array() +
           cache.i.middleCols(off, batch).array() * cache.g.middleCols(off, batch).array())
              .matrix();
    } else {
      cache.c.middleCols(off, batch) =
          (cache.i.middleCols(off, batch).array() * cache.g.middleCols(off, batch).array()).matrix();
    }
    cache.tc.middleCols(off, batch) = cache.c.middleCols(off, batch).array().tanh().matrix();
    cache.h.middleCols(off, batch) =
        (cache.o.middleCols(off, batch).array() * cache.tc.middleCols(off, batch).array()).matrix();
  }
}

// `dh_out` is dL/dh for every step arriving from above, same layout as
// cache.h. Accumulates parameter gradients and returns dL/dx.
Matrix layer_backward_batch(const LayerParams& p, const LayerCache& cache, const Matrix& dh_out,
                            LayerParams& grad) {
  const Eigen::Index hidden = p.U.cols();
  const Eigen::Index batch = cache.batch;
  const std::size_t steps = cache.steps;
  Matrix dz(4 * hidden, cache.h.cols());
  Matrix dh_next = Matrix::Zero(hidden, batch);
  Matrix dc_next = Matrix::Zero(hidden, batch);
  Matrix dh(hidden, batch);
  Matrix dc(hidden, batch);
  for (std::size_t s = steps; s-- > 0;) {
    const Eigen::Index off = static_cast<Eigen::Index>(s) * batch;
    dh = dh_next + dh_out.middleCols(off, batch);
    const auto i = cache.i.middleCols(off, batch).array();
    const auto f = cache.f.middleCols(off, batch).array();
    const auto o = cache.o.middleCols(off, batch).array();
    const auto g = cache.g.middleCols(off, batch).array();
    const auto tc = cache.tc.middleCols(off, batch).array();
    dc = (dc_next.array() + dh.array() * o * (1.0 - tc.square())).matrix();
    auto dzt = dz.middleCols(off, batch);
    dzt.topRows(hidden) = (dc.array() * g * i * (1.0 - i)).matrix();
    if (s > 0) {
      dzt.middleRows(hidden, hidden) =
          (dc.array() * cache.c.middleCols(off - batch, batch).array() * f * (1.0 - f)).matrix();
    } else {
      dzt.middleRows(hidden, hidden).setZero();
    }
    dzt.middleRows(2 * hidden, hidden) = (dh.array() * tc * o * (1.0 - o)).matrix();
    dzt.bottomRows(hidden) = (dc.array() * i * (1.0 - g.square())).matrix();
    if (s > 0) {
      dh_next.noalias() = p.U.transpose() * dzt;
    }
    dc_next = (dc.array() * f).matrix();
  }
  grad.W.noalias() += dz * cache.x.transpose();
  if (steps > 1) {
    const Eigen::Index tail = static_cast<Eigen::Index>(steps - 1) * batch;
    grad.U.noalias() += dz.rightCols(tail) * cache.h.leftCols(tail).transpose();
  }
  grad.b.noalias() += dz.rowwise().sum();
  return p.W.transpose() * dz;
}

Matrix concat_steps(const std::vector<Matrix>& xs) {
  const Eigen::Index batch = xs.front().cols();
  Matrix out(xs.front().rows(), batch * static_cast<Eigen::Index>(xs.size()));
  for (std::size_t t = 0; t < xs.size(); ++t) {
    out.middleCols(static_cast<Eigen::Index>(t) * batch, batch) = xs[t];
  }
  return out;
}

void check_inputs(const LstmModel& m, const BatchSequence& inputs) {
  if (inputs.empty()) {
    throw DomainError("empty input sequence");
  }
  for (const auto& x : inputs) {
    if (x.rows() != m.input_size || x.cols() != inputs.front().cols()) {
      throw DomainError("input batch has inconsistent shape");
    }
    if (!x.allFinite()) {
      throw DomainError("non-finite input");
    }
  }
}

BatchSequence gather(const SequenceDataset& ds, const std::vector<std::size_t>& starts, std::size_t from,
                     std::size_t count) {
  BatchSequence seq(static_cast<std::size_t>(ds.lookback), Matrix(ds.features.rows(), static_cast<Eigen::Index>(count)));
  for (std::size_t b = 0; b < count; ++b) {
    const std::size_t start = starts[from + b];
    for (int t = 0; t < ds.lookback; ++t) {
      seq[static_cast<std::size_t>(t)].col(static_cast<Eigen::Index>(b)) =
          ds.features.col(static_cast<Eigen::Index>(start + static_cast<std::size_t>(t)));
    }
  }
  return seq;
}

Vector gather_targets(const SequenceDataset& ds, const std::vector<std::size_t>& starts, std::size_t from,
                      std::size_t count) {
  Vector y(static_cast<Eigen::Index>(count));
  for (std::size_t b = 0; b < count; ++b) {
    y(static_cast<Eigen::Index>(b)) = ds.target[ds.target_row(starts[from + b])];
  }
  return y;
}

void zero_like(LstmModel& g, const LstmModel& m) {
  g = LstmModel::zeros(m.input_size, m.hidden, m.dropout);
}

}  // namespace

MinMax MinMax::fit(const std::vector<double>& xs) {
  if (xs.empty()) {
    throw DomainError("cannot fit normalization on no rows");
  }
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return MinMax{*lo, *hi};
}

Matrix SequenceDataset::window(std::size_t start) const {
  return features.middleCols(static_cast<Eigen::Index>(start), lookback);
}

SequenceDataset build_dataset(std::vector<SequenceRow> rows, int lookback, double split, int lag) {
  if (lookback < 1) {
    throw DomainError("lookback must be at least 1");
  }
  if (!(split > 0 && split < 1)) {
    throw DomainError("split fraction must lie in (0,1)");
  }
  const auto L = static_cast<std::size_t>(lookback);
  if (rows.size() <= L + 1) {
    throw DomainError("insufficient aligned data: need more than " + std::to_string(L + 1) + " rows, have " +
                      std::to_string(rows.size()));
  }
  SequenceDataset ds;
  ds.lookback = lookback;
  ds.lag = lag;
  ds.rows = std::move(rows);
  const std::size_t n = ds.rows.size();
  ds.split_point = static_cast<std::size_t>(std::floor(split * static_cast<double>(n)));
  if (ds.split_point == 0) {
    throw DomainError("split leaves no training rows");
  }
  std::vector<double> opens;
  std::vector<double> sents;
  for (std::size_t r = 0; r < ds.split_point; ++r) {
    opens.push_back(ds.rows[r].open);
    sents.push_back(ds.rows[r].sentiment);
  }
  ds.norm = {MinMax::fit(opens), MinMax::fit(sents)};
  ds.features.resize(kInputSize, static_cast<Eigen::Index>(n));
  ds.target.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    ds.features(0, static_cast<Eigen::Index>(r)) = ds.norm[0].normalize(ds.rows[r].open);
    ds.features(1, static_cast<Eigen::Index>(r)) = ds.norm[1].normalize(ds.rows[r].sentiment);
    ds.target[r] = ds.norm[0].normalize(ds.rows[r].open);
  }
  for (std::size_t start = 1; start + L < n; ++start) {
    bool consecutive = true;
    for (std::size_t r = start; r <= start + L && consecutive; ++r) {
      consecutive = ds.rows[r].trading_index == ds.rows[r - 1].trading_index + 1;
    }
    if (!consecutive) {
      continue;
    }
    (start + L < ds.split_point ? ds.train_windows : ds.test_windows).push_back(start);
  }
  if (ds.train_windows.empty()) {
    throw DomainError("no complete training window; need more aligned rows than lookback + 1");
  }
  return ds;
}

SequenceDataset build_dataset(const ingest::StockSeries& stock, const sentiment::DailySentimentSeries& s, int T,
                              int lookback, double split, lagsearch::FillPolicy fill) {
  if (T < 0) {
    throw DomainError("lag T must be non-negative");
  }
  const auto ts = lagsearch::to_trading_days(s, stock, fill);
  std::vector<SequenceRow> rows;
  const auto shift = static_cast<std::size_t>(T);
  for (std::size_t i = shift; i < stock.size(); ++i) {
    const auto& v = ts.value[i - shift];
    if (!v) {
      continue;
    }
    rows.push_back(SequenceRow{stock.bars[i].date, stock.bars[i].open, *v, i});
  }
  return build_dataset(std::move(rows), lookback, split, T);
}

LstmModel LstmModel::zeros(int input_size, int hidden, double dropout) {
  if (input_size < 1 || hidden < 1) {
    throw DomainError("model dimensions must be positive");
  }
  LstmModel m;
  m.input_size = input_size;
  m.hidden = hidden;
  m.dropout = dropout;
  int in = input_size;
  for (auto& layer : m.layers) {
    layer.W = Matrix::Zero(4 * hidden, in);
    layer.U = Matrix::Zero(4 * hidden, hidden);
    layer.b = Vector::Zero(4 * hidden);
    in = hidden;
  }
  m.head_w = Vector::Zero(hidden);
  m.head_b = 0;
  return m;
}

LstmModel LstmModel::init(int input_size, int hidden, std::uint64_t seed, double dropout) {
  LstmModel m = zeros(input_size, hidden, dropout);
  std::mt19937_64 rng(seed);
  const double k = 1.0 / std::sqrt(static_cast<double>(hidden));
  visit_params(m, [&](Eigen::Map<Vector> v) {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      v(j) = (2.0 * unit_uniform(rng) - 1.0) * k;
    }
  });
  for (auto& layer : m.layers) {
    layer.b.segment(hidden, hidden).array() = 1.0;
  }
  m.head_b = 0;
  return m;
}

std::size_t LstmModel::parameter_count() const {
  std::size_t n = 1 + static_cast<std::size_t>(head_w.size());
  for (const auto& layer : layers) {
    n += static_cast<std::size_t>(layer.W.size() + layer.U.size() + layer.b.size());
  }
  return n;
}

bool LstmModel::all_finite() const {
  for (const auto& layer : layers) {
    if (!layer.W.allFinite() || !layer.U.allFinite() || !layer.b.allFinite()) {
      return false;
    }
  }
  return head_w.allFinite() && std::isfinite(head_b);
}

CellState lstm_cell_forward(const LayerParams& p, const Vector& x, const Vector& h, const Vector& c) {
  const Eigen::Index hidden = p.U.cols();
  if (x.size() != p.W.cols() || h.size() != hidden || c.size() != hidden) {
    throw DomainError("cell input shapes inconsistent with parameters");
  }
  if (!x.allFinite() || !h.allFinite() || !c.allFinite()) {
    throw DomainError("non-finite cell input");
  }
  const Vector z = p.W * x + p.U * h + p.b;
  const Vector i = sigmoid(z.head(hidden));
  const Vector f = sigmoid(z.segment(hidden, hidden));
  const Vector o = sigmoid(z.segment(2 * hidden, hidden));
  const Vector g = z.tail(hidden).array().tanh().matrix();
  CellState out;
  out.c = (f.array() * c.array() + i.array() * g.array()).matrix();
  out.h = (o.array() * out.c.array().tanh()).matrix();
  return out;
}

Matrix layer_forward(const LayerParams& p, const Matrix& inputs) {
  const Eigen::Index hidden = p.U.cols();
  Matrix out(hidden, inputs.cols());
  Vector h = Vector::Zero(hidden);
  Vector c = Vector::Zero(hidden);
  for (Eigen::Index t = 0; t < inputs.cols(); ++t) {
    CellState s = lstm_cell_forward(p, inputs.col(t), h, c);
    h = std::move(s.h);
    c = std::move(s.c);
    out.col(t) = h;
  }
  return out;
}

double forward(const LstmModel& m, const Matrix& window, int lookback) {
  if (window.cols() != lookback) {
    throw DomainError("window length " + std::to_string(window.cols()) + " does not match lookback " +
                      std::to_string(lookback));
  }
  if (window.rows() != m.input_size) {
    throw DomainError("window feature count does not match the model");
  }
  const Matrix h1 = layer_forward(m.layers[0], window);
  const Matrix h2 = layer_forward(m.layers[1], h1);
  return m.head_w.dot(h2.col(h2.cols() - 1)) + m.head_b;
}

Vector predict_batch(const LstmModel& m, const BatchSequence& inputs) {
  check_inputs(m, inputs);
  const std::size_t steps = inputs.size();
  LayerCache c1;
  LayerCache c2;
  layer_forward_batch(m.layers[0], concat_steps(inputs), steps, c1);
  layer_forward_batch(m.layers[1], c1.h, steps, c2);
  Vector y = (m.head_w.transpose() * c2.step(c2.h, steps - 1)).transpose();
  y.array() += m.head_b;
  return y;
}

double loss_and_gradient(const LstmModel& m, const BatchSequence& inputs, const Vector& targets,
                         LstmModel& grad, std::mt19937_64* rng) {
  check_inputs(m, inputs);
  const Eigen::Index batch = inputs.front().cols();
  if (targets.size() != batch) {
    throw DomainError("target count does not match batch size");
  }
  const std::size_t steps = inputs.size();
  LayerCache c1;
  LayerCache c2;
  layer_forward_batch(m.layers[0], concat_steps(inputs), steps, c1);

  Matrix mask;
  if (rng != nullptr && m.dropout > 0) {
    const double keep_scale = 1.0 / (1.0 - m.dropout);
    mask.resize(c1.h.rows(), c1.h.cols());
    for (Eigen::Index j = 0; j < mask.size(); ++j) {
      mask(j) = unit_uniform(*rng) < m.dropout ? 0.0 : keep_scale;
    }
    layer_forward_batch(m.layers[1], (c1.h.array() * mask.array()).matrix(), steps, c2);
  } else {
    layer_forward_batch(m.layers[1], c1.h, steps, c2);
  }

  const auto h_last = c2.step(c2.h, steps - 1);
  Vector y = (m.head_w.transpose() * h_last).transpose();
  y.array() += m.head_b;
  const Vector err = y - targets;
  const double loss = err.squaredNorm() / static_cast<double>(batch);

  zero_like(grad, m);
  const Vector dy = err * (2.0 / static_cast<double>(batch));
  grad.head_w = h_last * dy;
  grad.head_b = dy.sum();

  Matrix dh2 = Matrix::Zero(c2.h.rows(), c2.h.cols());
  dh2.rightCols(batch) = m.head_w * dy.transpose();
  Matrix dx2 = layer_backward_batch(m.layers[1], c2, dh2, grad.layers[1]);
  if (mask.size() != 0) {
    dx2.array() *= mask.array();
  }
  layer_backward_batch(m.layers[0], c1, dx2, grad.layers[0]);
  return loss;
}

std::string to_string(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "sgd"; }

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "adam") return OptimizerKind::Adam;
  if (s == "sgd") return OptimizerKind::Sgd;
  throw Error("unknown optimizer '" + s + "' (adam|sgd)");
}

Optimizer::Optimizer(const LstmModel& shape, const TrainConfig& cfg) : cfg_(cfg) {
  zero_like(m1_, shape);
  zero_like(m2_, shape);
}

void Optimizer::step(LstmModel& m, LstmModel& grad) {
  ++t_;
  const double lr = cfg_.learning_rate;
  if (cfg_.optimizer == OptimizerKind::Sgd) {
    std::vector<Eigen::Map<Vector>> g;
    visit_params(grad, [&](Eigen::Map<Vector> v) { g.push_back(v); });
    std::size_t k = 0;
    visit_params(m, [&](Eigen::Map<Vector> p) { p -= lr * g[k++]; });
    return;
  }
  std::vector<Eigen::Map<Vector>> g;
  std::vector<Eigen::Map<Vector>> m1;
  std::vector<Eigen::Map<Vector>> m2;
  visit_params(grad, [&](Eigen::Map<Vector> v) { g.push_back(v); });
  visit_params(m1_, [&](Eigen::Map<Vector> v) { m1.push_back(v); });
  visit_params(m2_, [&](Eigen::Map<Vector> v) { m2.push_back(v); });
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  std::size_t k = 0;
  visit_params(m, [&](Eigen::Map<Vector> p) {
    m1[k] = cfg_.beta1 * m1[k] + (1.0 - cfg_.beta1) * g[k];
    m2[k] = cfg_.beta2 * m2[k] + (1.0 - cfg_.beta2) * g[k].cwiseAbs2();
    p.array() -= lr * (m1[k].array() / bc1) / ((m2[k].array() / bc2).sqrt() + cfg_.epsilon);
    ++k;
  });
}

double split_mse(const LstmModel& m, const SequenceDataset& ds, const std::vector<std::size_t>& windows) {
  if (windows.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  constexpr std::size_t kChunk = 256;
  double sum = 0;
  for (std::size_t from = 0; from < windows.size(); from += kChunk) {
    const std::size_t count = std::min(kChunk, windows.size() - from);
    const Vector y = predict_batch(m, gather(ds, windows, from, count));
    const Vector t = gather_targets(ds, windows, from, count);
    sum += (y - t).squaredNorm();
  }
  return sum / static_cast<double>(windows.size());
}

TrainResult train(LstmModel model, const SequenceDataset& ds, const TrainConfig& cfg) {
  if (cfg.batch_size < 1 || cfg.epochs < 0 || !(cfg.learning_rate > 0)) {
    throw DomainError("invalid training configuration");
  }
  if (cfg.lookback != ds.lookback) {
    throw DomainError("config lookback does not match the dataset");
  }
  if (ds.train_windows.empty()) {
    throw DomainError("empty training split");
  }
  std::mt19937_64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ull);
  Optimizer opt(model, cfg);
  LstmModel grad;
  std::vector<std::size_t> order = ds.train_windows;
  TrainResult out;
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0;
    for (std::size_t k = order.size(); k > 1; --k) {
      std::swap(order[k - 1], order[rng() % k]);
    }
    for (std::size_t from = 0; from < order.size(); from += batch_size) {
      const std::size_t count = std::min(batch_size, order.size() - from);
      const double loss =
          loss_and_gradient(model, gather(ds, order, from, count), gather_targets(ds, order, from, count), grad, &rng);
      if (!std::isfinite(loss)) {
        throw Error("training diverged: non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch starting " +
                    std::to_string(from) + " (learning rate " + std::to_string(cfg.learning_rate) + ")");
      }
      loss_sum += loss * static_cast<double>(count);
      opt.step(model, grad);
    }
    if (!model.all_finite()) {
      throw Error("training diverged: non-finite parameters after epoch " + std::to_string(epoch + 1));
    }
    out.history.push_back({loss_sum / static_cast<double>(order.size()), split_mse(model, ds, ds.test_windows)});
  }
  out.model = std::move(model);
  return out;
}

TrainResult train(const SequenceDataset& ds, const TrainConfig& cfg) {
  return train(LstmModel::init(kInputSize, cfg.hidden, cfg.seed, cfg.dropout), ds, cfg);
}

std::vector<Prediction> predict_series(const LstmModel& m, const SequenceDataset& ds, Split which) {
  const auto& windows = which == Split::Train ? ds.train_windows : ds.test_windows;
  std::vector<Prediction> out;
  if (windows.empty()) {
    return out;
  }
  out.reserve(windows.size());
  const Vector y = predict_batch(m, gather(ds, windows, 0, windows.size()));
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const std::size_t row = ds.target_row(windows[k]);
    Prediction p;
    p.date = ds.rows[row].date;
    p.predicted_norm = y(static_cast<Eigen::Index>(k));
    p.actual_norm = ds.target[row];
    p.predicted = ds.norm[0].denormalize(p.predicted_norm);
    p.actual = ds.rows[row].open;
    out.push_back(p);
  }
  return out;
}

namespace {

json matrix_json(const Matrix& a) {
  return json{{"rows", a.rows()}, {"cols", a.cols()}, {"data", std::vector<double>(a.data(), a.data() + a.size())}};
}

Matrix matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw Error("checkpoint tensor size mismatch");
  }
  return Eigen::Map<const Matrix>(data.data(), rows, cols);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  json obj;
  obj["format"] = "sentilag-lstm-checkpoint";
  obj["version"] = 1;
  obj["input_size"] = ck.model.input_size;
  obj["hidden"] = ck.model.hidden;
  obj["dropout"] = ck.model.dropout;
  obj["lag"] = ck.lag;
  json layers = json::array();
  for (const auto& layer : ck.model.layers) {
    layers.push_back({{"W", matrix_json(layer.W)}, {"U", matrix_json(layer.U)}, {"b", matrix_json(layer.b)}});
  }
  obj["layers"] = std::move(layers);
  obj["head_w"] = matrix_json(ck.model.head_w);
  obj["head_b"] = ck.model.head_b;
  obj["normalization"] = json::array();
  for (const auto& n : ck.norm) {
    obj["normalization"].push_back({{"min", n.min}, {"max", n.max}});
  }
  const TrainConfig& c = ck.config;
  obj["config"] = {{"batch_size", c.batch_size}, {"epochs", c.epochs},     {"learning_rate", c.learning_rate},
                   {"seed", c.seed},             {"lookback", c.lookback}, {"hidden", c.hidden},
                   {"dropout", c.dropout},       {"optimizer", to_string(c.optimizer)}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << obj.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  try {
    const json obj = json::parse(in);
    if (obj.at("format") != "sentilag-lstm-checkpoint") {
      throw Error(path.string() + ": not an LSTM checkpoint");
    }
    Checkpoint ck;
    ck.model = LstmModel::zeros(obj.at("input_size").get<int>(), obj.at("hidden").get<int>(),
                                obj.at("dropout").get<double>());
    ck.lag = obj.at("lag").get<int>();
    for (std::size_t l = 0; l < 2; ++l) {
      const json& jl = obj.at("layers").at(l);
      LayerParams& p = ck.model.layers[l];
      const Matrix W = matrix_from(jl.at("W"));
      const Matrix U = matrix_from(jl.at("U"));
      const Matrix b = matrix_from(jl.at("b"));
      if (W.rows() != p.W.rows() || W.cols() != p.W.cols() || U.rows() != p.U.rows() || U.cols() != p.U.cols() ||
          b.size() != p.b.size()) {
        throw Error(path.string() + ": layer shape mismatch");
      }
      p.W = W;
      p.U = U;
      p.b = b;
    }
    const Matrix hw = matrix_from(obj.at("head_w"));
    if (hw.size() != ck.model.head_w.size()) {
      throw Error(path.string() + ": head shape mismatch");
    }
    ck.model.head_w = Eigen::Map<const Vector>(hw.data(), hw.size());
    ck.model.head_b = obj.at("head_b").get<double>();
    for (std::size_t k = 0; k < ck.norm.size(); ++k) {
      ck.norm[k] = MinMax{obj.at("normalization").at(k).at("min").get<double>(),
                          obj.at("normalization").at(k).at("max").get<double>()};
    }
    const json& c = obj.at("config");
    ck.config.batch_size = c.at("batch_size").get<int>();
    ck.config.epochs = c.at("epochs").get<int>();
    ck.config.learning_rate = c.at("learning_rate").get<double>();
    ck.config.seed = c.at("seed").get<std::uint64_t>();
    ck.config.lookback = c.at("lookback").get<int>();
    ck.config.hidden = c.at("hidden").get<int>();
    ck.config.dropout = c.at("dropout").get<double>();
    ck.config.optimizer = parse_optimizer(c.at("optimizer").get<std::string>());
    if (!ck.model.all_finite()) {
      throw Error(path.string() + ": non-finite parameters");
    }
    return ck;
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace sentilag::lstm
