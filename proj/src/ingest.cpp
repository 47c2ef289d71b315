#include "sentilag/ingest.hpp"

#include "sentilag/csv.hpp"
#include "sentilag/error.hpp"
#include "sentilag/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

namespace sentilag::ingest {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::array<std::string_view, 7> kPostKeys = {"post_id", "user_id", "created_at", "text",
                                                       "comments", "reposts", "likes"};

std::ifstream open_or_throw(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  return in;
}

std::int64_t count_field(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw Error(std::string(key) + " must be an integer");
  }
  const auto n = v.get<std::int64_t>();
  if (n < 0) {
    throw Error(std::string(key) + " must be non-negative");
  }
  return n;
}

std::string string_field(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_string()) {
    throw Error(std::string(key) + " must be a string");
  }
  return v.get<std::string>();
}

PostRecord parse_post(std::string_view line, TzOffset tz) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) {
    throw Error("record is not a JSON object");
  }
  for (auto key : kPostKeys) {
    if (!obj.contains(key)) {
      throw Error("missing key '" + std::string(key) + "'");
    }
  }
  if (obj.size() != kPostKeys.size()) {
    for (const auto& item : obj.items()) {
      if (std::find(kPostKeys.begin(), kPostKeys.end(), item.key()) == kPostKeys.end()) {
        throw Error("unexpected key '" + item.key() + "'");
      }
    }
  }
  PostRecord p;
  p.post_id = string_field(obj, "post_id");
  p.user_id = string_field(obj, "user_id");
  p.created_at = Timestamp::parse(string_field(obj, "created_at"), tz);
  p.text = string_field(obj, "text");
  p.comments = count_field(obj, "comments");
  p.reposts = count_field(obj, "reposts");
  p.likes = count_field(obj, "likes");
  if (p.post_id.empty()) {
    throw Error("post_id is empty");
  }
  return p;
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

PostCollection load_posts(const fs::path& path, const LoadPostsOptions& opts) {
  auto in = open_or_throw(path);
  PostCollection out;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  long lineno = 0;
  long records = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) {
      continue;
    }
    ++records;
    PostRecord p;
    try {
      p = parse_post(line, opts.tz);
    } catch (const Error& e) {
      out.malformed.push_back({lineno, e.what()});
      continue;
    }
    if (!seen_ids.insert(p.post_id).second) {
      out.malformed.push_back({lineno, "duplicate post_id '" + p.post_id + "'"});
      continue;
    }
    if (!opts.range.contains(p.created_at.local_date(opts.tz))) {
      continue;
    }
    if (!text::contains_folded(p.text, opts.keyword)) {
      continue;
    }
    out.posts.push_back(std::move(p));
  }
  if (records > 0 &&
      static_cast<double>(out.malformed.size()) > opts.max_malformed_fraction * static_cast<double>(records)) {
    throw FormatError(path.string(), out.malformed.front().line,
                      std::to_string(out.malformed.size()) + " of " + std::to_string(records) +
                          " records malformed; first: " + out.malformed.front().reason);
  }
  return out;
}

PostCollection clean_posts(const PostCollection& in) {
  PostCollection out;
  out.malformed = in.malformed;
  out.dropped_empty = in.dropped_empty;
  out.dropped_duplicate = in.dropped_duplicate;
  std::set<std::pair<std::string, std::string>> seen;
  for (const PostRecord& p : in.posts) {
    PostRecord c = p;
    c.text = text::clean(p.text);
    if (c.text.empty()) {
      ++out.dropped_empty;
      continue;
    }
    if (!seen.emplace(c.user_id, c.text).second) {
      ++out.dropped_duplicate;
      continue;
    }
    out.posts.push_back(std::move(c));
  }
  return out;
}

void write_posts(const fs::path& path, const std::vector<PostRecord>& posts, TzOffset tz) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  for (const PostRecord& p : posts) {
    json obj = json::object();
    obj["post_id"] = p.post_id;
    obj["user_id"] = p.user_id;
    obj["created_at"] = p.created_at.iso(tz);
    obj["text"] = p.text;
    obj["comments"] = p.comments;
    obj["reposts"] = p.reposts;
    obj["likes"] = p.likes;
    out << obj.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

std::vector<PostRecord> read_posts(const fs::path& path, TzOffset tz) {
  auto in = open_or_throw(path);
  std::vector<PostRecord> posts;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) {
      continue;
    }
    try {
      posts.push_back(parse_post(line, tz));
    } catch (const Error& e) {
      throw FormatError(path.string(), lineno, e.what());
    }
  }
  return posts;
}

std::optional<std::size_t> StockSeries::find(Date d) const {
  auto it = std::lower_bound(bars.begin(), bars.end(), d,
                             [](const StockBar& b, Date v) { return b.date < v; });
  if (it == bars.end() || it->date != d) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - bars.begin());
}

std::optional<std::size_t> StockSeries::next_on_or_after(Date d) const {
  auto it = std::lower_bound(bars.begin(), bars.end(), d,
                             [](const StockBar& b, Date v) { return b.date < v; });
  if (it == bars.end()) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - bars.begin());
}

StockSeries load_stock_bars(const fs::path& path) {
  auto in = open_or_throw(path);
  const std::string source = path.string();
  std::string line;
  long lineno = 0;
  std::map<std::string, std::size_t> column;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) {
      continue;
    }
    const auto header = csv::split(line);
    for (std::size_t k = 0; k < header.size(); ++k) {
      std::string name = csv::trim(header[k]);
      if (lineno == 1 && name.rfind("\xEF\xBB\xBF", 0) == 0) {
        name.erase(0, 3);
      }
      std::transform(name.begin(), name.end(), name.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      column[name] = k;
    }
    break;
  }
  if (column.empty()) {
    throw FormatError(source, lineno, "missing header row");
  }
  for (const char* required : {"date", "open", "close", "high", "low", "volume"}) {
    if (!column.count(required)) {
      throw FormatError(source, 1, std::string("missing column '") + required + "'");
    }
  }
  const bool has_change = column.count("change_pct") > 0;

  struct Row {
    StockBar bar;
    bool change_given = false;
    long line = 0;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) {
      continue;
    }
    const auto cells = csv::split(line);
    auto cell = [&](const char* name) -> const std::string& {
      const std::size_t k = column.at(name);
      if (k >= cells.size()) {
        throw FormatError(source, lineno, std::string("missing cell '") + name + "'");
      }
      return cells[k];
    };
    Row r;
    r.line = lineno;
    try {
      r.bar.date = Date::parse(csv::trim(cell("date")));
      r.bar.open = csv::parse_double(cell("open"));
      r.bar.close = csv::parse_double(cell("close"));
      r.bar.high = csv::parse_double(cell("high"));
      r.bar.low = csv::parse_double(cell("low"));
      r.bar.volume = csv::parse_double(cell("volume"));
      if (has_change && !csv::trim(cell("change_pct")).empty()) {
        r.bar.change_pct = csv::parse_double(cell("change_pct"));
        r.change_given = true;
      }
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(source, lineno, e.what());
    }
    const StockBar& b = r.bar;
    if (b.volume < 0) {
      throw FormatError(source, lineno, "negative volume");
    }
    if (!(b.low <= std::min(b.open, b.close) && std::max(b.open, b.close) <= b.high)) {
      throw FormatError(source, lineno, "bar violates low <= open,close <= high");
    }
    rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.bar.date < b.bar.date; });
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].bar.date == rows[k - 1].bar.date) {
      throw FormatError(source, rows[k].line, "duplicate date " + rows[k].bar.date.iso());
    }
  }
  StockSeries series;
  series.index_name = path.stem().string();
  series.bars.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    StockBar b = rows[k].bar;
    if (!rows[k].change_given) {
      b.change_pct = k == 0 ? 0.0 : (b.close - rows[k - 1].bar.close) / rows[k - 1].bar.close;
    }
    series.bars.push_back(b);
  }
  return series;
}

void write_stock_bars(const fs::path& path, const StockSeries& series) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << "date,open,close,high,low,volume,change_pct\n";
  for (const StockBar& b : series.bars) {
    out << b.date.iso() << ',' << csv::number(b.open) << ',' << csv::number(b.close) << ','
        << csv::number(b.high) << ',' << csv::number(b.low) << ',' << csv::number(b.volume) << ','
        << csv::number(b.change_pct) << '\n';
  }
}

}  // namespace sentilag::ingest
