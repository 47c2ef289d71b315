#include "sentilag/sentiment.hpp"

#include "sentilag/csv.hpp"
#include "sentilag/error.hpp"
#include "sentilag/text.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace sentilag::sentiment {

using json = nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double sigmoid(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_features(const FeatureConfig& cfg) {
  if (cfg.hash_dims < 2 || !std::has_single_bit(cfg.hash_dims)) {
    throw DomainError("hash_dims must be a power of two, at least 2");
  }
  if (cfg.ngram_orders.empty() || *cfg.ngram_orders.begin() < 1) {
    throw DomainError("n-gram orders must be positive");
  }
}

}  // namespace

double SparseVector::dot(const std::vector<double>& dense) const {
  double s = 0;
  for (std::size_t k = 0; k < index.size(); ++k) {
    s += value[k] * dense[index[k]];
  }
  return s;
}

double cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0;
  double na = 0;
  double nb = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.nnz() && j < b.nnz()) {
    if (a.index[i] == b.index[j]) {
      dot += a.value[i++] * b.value[j++];
    } else if (a.index[i] < b.index[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  for (double v : a.value) na += v * v;
  for (double v : b.value) nb += v * v;
  if (na == 0 || nb == 0) {
    throw DomainError("cosine of a zero vector");
  }
  return dot / std::sqrt(na * nb);
}

SparseVector featurize(std::string_view raw, const FeatureConfig& cfg) {
  check_features(cfg);
  if (raw.empty()) {
    throw DomainError("cannot featurize empty text");
  }
  const std::u32string cps = text::decode(raw);
  if (cps.empty()) {
    throw DomainError("text has no decodable characters");
  }
  std::map<std::uint32_t, double> counts;
  for (int order : cfg.ngram_orders) {
    const auto n = static_cast<std::size_t>(order);
    if (cps.size() < n) {
      continue;
    }
    const char tag = static_cast<char>(order);
    for (std::size_t s = 0; s + n <= cps.size(); ++s) {
      const std::string gram = text::encode(std::u32string_view(cps).substr(s, n));
      const std::uint64_t h = fnv1a(gram, fnv1a(std::string_view(&tag, 1)));
      counts[static_cast<std::uint32_t>(h % cfg.hash_dims)] += 1.0;
    }
  }
  SparseVector v;
  double norm = 0;
  for (const auto& [k, c] : counts) {
    norm += c * c;
  }
  norm = std::sqrt(norm);
  for (const auto& [k, c] : counts) {
    v.index.push_back(k);
    v.value.push_back(c / norm);
  }
  return v;
}

SentimentModel SentimentModel::zeros(const FeatureConfig& cfg) {
  check_features(cfg);
  SentimentModel m;
  m.features = cfg;
  m.weights.assign(cfg.hash_dims, 0.0);
  return m;
}

Corpus featurize_corpus(const std::vector<LabeledText>& corpus, const FeatureConfig& cfg) {
  Corpus c;
  c.x.reserve(corpus.size());
  c.y.reserve(corpus.size());
  for (const auto& item : corpus) {
    if (item.label != 0 && item.label != 1) {
      throw DomainError("corpus label must be 0 or 1");
    }
    c.x.push_back(featurize(item.text, cfg));
    c.y.push_back(item.label);
  }
  return c;
}

double classifier_loss(const SentimentModel& m, const Corpus& c, double l2) {
  double loss = 0;
  for (std::size_t k = 0; k < c.x.size(); ++k) {
    const double z = c.x[k].dot(m.weights) + m.bias;
    loss += c.y[k] == 1 ? softplus(-z) : softplus(z);
  }
  loss /= static_cast<double>(c.x.size());
  double sq = 0;
  for (double w : m.weights) sq += w * w;
  return loss + 0.5 * l2 * sq;
}

std::vector<double> classifier_gradient(const SentimentModel& m, const Corpus& c, double l2) {
  const std::size_t dims = m.weights.size();
  std::vector<double> g(dims + 1, 0.0);
  const double inv_n = 1.0 / static_cast<double>(c.x.size());
  for (std::size_t k = 0; k < c.x.size(); ++k) {
    const double z = c.x[k].dot(m.weights) + m.bias;
    const double r = (sigmoid(z) - c.y[k]) * inv_n;
    for (std::size_t j = 0; j < c.x[k].nnz(); ++j) {
      g[c.x[k].index[j]] += r * c.x[k].value[j];
    }
    g[dims] += r;
  }
  for (std::size_t j = 0; j < dims; ++j) {
    g[j] += l2 * m.weights[j];
  }
  return g;
}

TrainResult train_classifier(const std::vector<LabeledText>& corpus, const TrainHyper& hyper,
                             const FeatureConfig& cfg) {
  bool has_pos = false;
  bool has_neg = false;
  for (const auto& item : corpus) {
    (item.label == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw DomainError("training corpus must contain both classes");
  }
  if (!(hyper.learning_rate > 0) || hyper.epochs < 0 || hyper.l2 < 0) {
    throw DomainError("invalid classifier hyperparameters");
  }
  const Corpus c = featurize_corpus(corpus, cfg);
  TrainResult out{SentimentModel::zeros(cfg), {}};
  SentimentModel& m = out.model;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    out.loss_history.push_back(classifier_loss(m, c, hyper.l2));
    const auto g = classifier_gradient(m, c, hyper.l2);
    for (std::size_t j = 0; j < m.weights.size(); ++j) {
      m.weights[j] -= hyper.learning_rate * g[j];
    }
    m.bias -= hyper.learning_rate * g.back();
  }
  out.loss_history.push_back(classifier_loss(m, c, hyper.l2));
  return out;
}

SentimentLabel score(const SentimentModel& model, std::string_view text, std::string post_id) {
  const SparseVector x = featurize(text, model.features);
  SentimentLabel out;
  out.post_id = std::move(post_id);
  out.probability = sigmoid(x.dot(model.weights) + model.bias);
  out.label = out.probability >= kDecisionThreshold ? 1 : 0;
  return out;
}

void save_model(const std::filesystem::path& path, const SentimentModel& model) {
  json obj;
  obj["format"] = "sentilag-sentiment-model";
  obj["version"] = 1;
  obj["hash_dims"] = model.features.hash_dims;
  obj["ngram_orders"] = model.features.ngram_orders;
  obj["bias"] = model.bias;
  json weights = json::array();
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    if (model.weights[j] != 0.0) {
      weights.push_back({j, model.weights[j]});
    }
  }
  obj["weights"] = std::move(weights);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << obj.dump() << '\n';
}

SentimentModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  try {
    const json obj = json::parse(in);
    if (obj.at("format") != "sentilag-sentiment-model") {
      throw Error(path.string() + ": not a sentiment model file");
    }
    FeatureConfig cfg;
    cfg.hash_dims = obj.at("hash_dims").get<std::uint32_t>();
    cfg.ngram_orders = obj.at("ngram_orders").get<std::set<int>>();
    SentimentModel m = SentimentModel::zeros(cfg);
    m.bias = obj.at("bias").get<double>();
    for (const auto& entry : obj.at("weights")) {
      const auto j = entry.at(0).get<std::size_t>();
      if (j >= m.weights.size()) {
        throw Error(path.string() + ": weight index out of range");
      }
      m.weights[j] = entry.at(1).get<double>();
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<LabeledText> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::vector<LabeledText> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || csv::trim(line).empty()) {
      continue;  // header
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw FormatError(path.string(), lineno, "expected label,text");
    }
    LabeledText item;
    try {
      item.label = static_cast<int>(csv::parse_int(std::string_view(line).substr(0, comma)));
    } catch (const Error& e) {
      throw FormatError(path.string(), lineno, e.what());
    }
    if (item.label != 0 && item.label != 1) {
      throw FormatError(path.string(), lineno, "label must be 0 or 1");
    }
    std::string rest = line.substr(comma + 1);
    if (!rest.empty() && rest.front() == '"') {
      auto fields = csv::split(rest);
      rest = fields.empty() ? std::string() : fields.front();
    }
    item.text = text::clean(rest);
    if (!item.text.empty()) {
      out.push_back(std::move(item));
    }
  }
  return out;
}

std::vector<SentimentLabel> ingest_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::vector<SentimentLabel> out;
  std::unordered_set<std::string> seen;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (csv::trim(line).empty()) {
      continue;
    }
    SentimentLabel l;
    try {
      const json obj = json::parse(line);
      const json& id = obj.at("post_id");
      l.post_id = id.is_string() ? id.get<std::string>() : id.dump();
      const json& lab = obj.at("label");
      if (!lab.is_number_integer() || (lab.get<long long>() != 0 && lab.get<long long>() != 1)) {
        throw Error("label must be 0 or 1, got " + lab.dump());
      }
      l.label = lab.get<int>();
      const json& prob = obj.at("probability");
      if (!prob.is_number() || !(prob.get<double>() >= 0.0 && prob.get<double>() <= 1.0)) {
        throw Error("probability must lie in [0,1], got " + prob.dump());
      }
      l.probability = prob.get<double>();
    } catch (const json::exception& e) {
      throw FormatError(path.string(), lineno, e.what());
    } catch (const Error& e) {
      throw FormatError(path.string(), lineno, e.what());
    }
    if (!seen.insert(l.post_id).second) {
      throw FormatError(path.string(), lineno, "duplicate post_id '" + l.post_id + "'");
    }
    out.push_back(std::move(l));
  }
  return out;
}

void write_labels(const std::filesystem::path& path, const std::vector<SentimentLabel>& labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  for (const auto& l : labels) {
    json obj = json::object();
    obj["post_id"] = l.post_id;
    obj["label"] = l.label;
    obj["probability"] = l.probability;
    out << obj.dump() << '\n';
  }
}

double day_value(const std::vector<int>& labels) {
  if (labels.empty()) {
    throw DomainError("no labels for day");
  }
  std::int64_t positives = 0;
  for (int l : labels) {
    positives += l;
  }
  return static_cast<double>(positives) / static_cast<double>(labels.size());
}

AggregateResult daily_aggregate(const std::vector<SentimentLabel>& labels,
                                const std::vector<ingest::PostRecord>& posts, TzOffset tz,
                                AggregateMode mode) {
  std::unordered_map<std::string, const SentimentLabel*> by_id;
  by_id.reserve(labels.size());
  for (const auto& l : labels) {
    by_id.emplace(l.post_id, &l);
  }
  std::map<Date, std::vector<int>> hard;
  std::map<Date, std::pair<double, std::int64_t>> soft;
  AggregateResult out;
  std::size_t joined = 0;
  for (const auto& p : posts) {
    const auto it = by_id.find(p.post_id);
    if (it == by_id.end()) {
      ++out.unlabeled_posts;
      continue;
    }
    ++joined;
    const Date d = p.created_at.local_date(tz);
    hard[d].push_back(it->second->label);
    auto& s = soft[d];
    s.first += it->second->probability;
    s.second += 1;
  }
  out.orphan_labels = labels.size() - std::min(labels.size(), joined);
  for (const auto& [d, ls] : hard) {
    DayEntry e;
    e.posts = static_cast<std::int64_t>(ls.size());
    if (mode == AggregateMode::HardLabel) {
      e.value = day_value(ls);
    } else {
      e.value = std::min(1.0, soft[d].first / static_cast<double>(soft[d].second));
    }
    out.series.emplace(d, e);
  }
  return out;
}

void write_series(const std::filesystem::path& path, const DailySentimentSeries& series) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << "date,sentiment,posts\n";
  for (const auto& [d, e] : series) {
    out << d.iso() << ',' << csv::number(e.value) << ',' << e.posts << '\n';
  }
}

DailySentimentSeries read_series(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  DailySentimentSeries series;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || csv::trim(line).empty()) {
      continue;
    }
    const auto cells = csv::split(line);
    if (cells.size() < 3) {
      throw FormatError(path.string(), lineno, "expected date,sentiment,posts");
    }
    try {
      const Date d = Date::parse(csv::trim(cells[0]));
      DayEntry e{csv::parse_double(cells[1]), csv::parse_int(cells[2])};
      if (!(e.value >= 0 && e.value <= 1) || e.posts < 1) {
        throw Error("sentiment outside [0,1] or non-positive post count");
      }
      if (!series.emplace(d, e).second) {
        throw Error("duplicate date " + d.iso());
      }
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(path.string(), lineno, e.what());
    }
  }
  return series;
}

}  // namespace sentilag::sentiment
