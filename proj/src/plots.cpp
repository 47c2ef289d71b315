#include "sentilag/plots.hpp"

#include "sentilag/csv.hpp"
#include "sentilag/dates.hpp"
#include "sentilag/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace sentilag::plots {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

void validate(const std::vector<Series>& series) {
  if (series.empty()) {
    throw DomainError("plot: no series");
  }
  for (const auto& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size()) {
      throw DomainError("plot: series '" + s.name + "' is empty or ragged");
    }
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) {
        throw DomainError("plot: series '" + s.name + "' has non-finite values");
      }
    }
  }
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string tick_label(double v, bool is_date) {
  if (is_date) {
    return Date{static_cast<std::int32_t>(std::lround(v))}.iso();
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

AxisRange axis_range(const std::vector<Series>& series, double padding) {
  validate(series);
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const auto& s : series) {
    const auto [xa, xb] = std::minmax_element(s.x.begin(), s.x.end());
    const auto [ya, yb] = std::minmax_element(s.y.begin(), s.y.end());
    x_lo = std::min(x_lo, *xa);
    x_hi = std::max(x_hi, *xb);
    y_lo = std::min(y_lo, *ya);
    y_hi = std::max(y_hi, *yb);
  }
  const double xs = x_hi > x_lo ? x_hi - x_lo : 1.0;
  const double ys = y_hi > y_lo ? y_hi - y_lo : 1.0;
  return AxisRange{x_lo - padding * xs, x_hi + padding * xs, y_lo - padding * ys, y_hi + padding * ys};
}

std::string line_chart_svg(const std::vector<Series>& series, const ChartOptions& opts) {
  const AxisRange r = axis_range(series, opts.padding);
  const double left = 70;
  const double right = 20;
  const double top = 40;
  const double bottom = 50;
  const double pw = opts.width - left - right;
  const double ph = opts.height - top - bottom;
  auto px = [&](double x) { return left + (x - r.x_min) / (r.x_max - r.x_min) * pw; };
  auto py = [&](double y) { return top + (r.y_max - y) / (r.y_max - r.y_min) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\"" << opts.height
      << "\" viewBox=\"0 0 " << opts.width << ' ' << opts.height << "\" data-x-min=\"" << csv::number(r.x_min)
      << "\" data-x-max=\"" << csv::number(r.x_max) << "\" data-y-min=\"" << csv::number(r.y_min)
      << "\" data-y-max=\"" << csv::number(r.y_max) << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << opts.width << "\" height=\"" << opts.height << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fixed(opts.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(opts.title) << "</text>\n";
  svg << "<g stroke=\"#444\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top + ph) << "\" x2=\"" << fixed(left + pw) << "\" y2=\""
      << fixed(top + ph) << "\"/>\n";
  svg << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(left) << "\" y2=\""
      << fixed(top + ph) << "\"/>\n";
  svg << "</g>\n<g font-size=\"11\" fill=\"#333\">\n";
  constexpr int kTicks = 5;
  for (int k = 0; k <= kTicks; ++k) {
    const double fx = r.x_min + (r.x_max - r.x_min) * k / kTicks;
    const double fy = r.y_min + (r.y_max - r.y_min) * k / kTicks;
    svg << "<text x=\"" << fixed(px(fx)) << "\" y=\"" << fixed(top + ph + 16) << "\" text-anchor=\"middle\">"
        << tick_label(fx, opts.x_is_date) << "</text>\n";
    svg << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(py(fy) + 4) << "\" text-anchor=\"end\">"
        << tick_label(fy, false) << "</text>\n";
  }
  svg << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(opts.height - 8.0)
      << "\" text-anchor=\"middle\">" << xml_escape(opts.x_label) << "</text>\n";
  svg << "<text x=\"14\" y=\"" << fixed(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << fixed(top + ph / 2) << ")\">" << xml_escape(opts.y_label) << "</text>\n";
  svg << "</g>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" data-name=\""
        << xml_escape(s.name) << "\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      svg << (j ? " " : "") << fixed(px(s.x[j])) << ',' << fixed(py(s.y[j]));
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << fixed(left + 10) << "\" y=\"" << fixed(top + 14 + 14.0 * static_cast<double>(k))
        << "\" font-size=\"11\" fill=\"" << color << "\">" << xml_escape(s.name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_line_chart(const std::filesystem::path& path, const std::vector<Series>& series,
                      const ChartOptions& opts) {
  const std::string svg = line_chart_svg(series, opts);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << svg;
}

void write_series_csv(const std::filesystem::path& path, const std::vector<Series>& series,
                      const ChartOptions& opts) {
  validate(series);
  for (const auto& s : series) {
    if (s.x != series.front().x) {
      throw DomainError("plot CSV: series do not share x values");
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << csv::escape(opts.x_label);
  for (const auto& s : series) {
    out << ',' << csv::escape(s.name);
  }
  out << '\n';
  for (std::size_t j = 0; j < series.front().x.size(); ++j) {
    const double x = series.front().x[j];
    out << (opts.x_is_date ? Date{static_cast<std::int32_t>(std::lround(x))}.iso() : csv::number(x));
    for (const auto& s : series) {
      out << ',' << csv::number(s.y[j]);
    }
    out << '\n';
  }
}

}  // namespace sentilag::plots
