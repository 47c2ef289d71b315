#include "sentilag/error.hpp"
#include "sentilag/plots.hpp"

#include "support/synthetic.hpp"

#include <gtest/gtest.h>

#include <random>
#include <regex>
#include <sstream>

using namespace sentilag;
using namespace sentilag::plots;
using sentilag::testing::read_text;
using sentilag::testing::TempDir;

namespace {

double attr(const std::string& svg, const std::string& name) {
  const std::regex re(name + "=\"([^\"]+)\"");
  std::smatch m;
  if (!std::regex_search(svg, m, re)) {
    ADD_FAILURE() << "missing " << name;
    return 0;
  }
  return std::stod(m[1]);
}

std::vector<std::vector<std::pair<double, double>>> polylines(const std::string& svg) {
  std::vector<std::vector<std::pair<double, double>>> out;
  const std::regex re("<polyline[^>]*points=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    std::vector<std::pair<double, double>> pts;
    std::istringstream ss((*it)[1].str());
    std::string tok;
    while (ss >> tok) {
      const auto comma = tok.find(',');
      pts.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
    }
    out.push_back(pts);
  }
  return out;
}

}  // namespace

TEST(Plots, TwoPointSeries) {
  const std::string svg = line_chart_svg({{"s", {0, 1}, {5, 6}}}, {});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  const auto lines = polylines(svg);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].size(), 2u);
}

TEST(Plots, AxisRangesCoverDataWithPadding) {
  std::mt19937_64 rng(16);
  std::normal_distribution<double> g(0, 50);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Series> series(1 + rng() % 3);
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (auto& s : series) {
      s.name = "s";
      for (int k = 0, n = 1 + static_cast<int>(rng() % 30); k < n; ++k) {
        s.x.push_back(g(rng));
        s.y.push_back(g(rng) + 1000);
        xlo = std::min(xlo, s.x.back());
        xhi = std::max(xhi, s.x.back());
        ylo = std::min(ylo, s.y.back());
        yhi = std::max(yhi, s.y.back());
      }
    }
    ChartOptions opts;
    opts.padding = 0.1;
    const auto svg = line_chart_svg(series, opts);
    const double xs = xhi > xlo ? xhi - xlo : 1.0;
    const double ys = yhi > ylo ? yhi - ylo : 1.0;
    EXPECT_NEAR(attr(svg, "data-x-min"), xlo - 0.1 * xs, 1e-9);
    EXPECT_NEAR(attr(svg, "data-x-max"), xhi + 0.1 * xs, 1e-9);
    EXPECT_NEAR(attr(svg, "data-y-min"), ylo - 0.1 * ys, 1e-9);
    EXPECT_NEAR(attr(svg, "data-y-max"), yhi + 0.1 * ys, 1e-9);
    // every drawn point lies inside the plot frame
    for (const auto& line : polylines(svg)) {
      for (const auto& [px, py] : line) {
        EXPECT_GE(px, 70.0);
        EXPECT_LE(px, opts.width - 20.0);
        EXPECT_GE(py, 40.0);
        EXPECT_LE(py, opts.height - 50.0);
      }
    }
  }
}

TEST(Plots, CsvRowCountMatchesSeries) {
  TempDir dir("plots");
  Series a{"predicted", {1, 2, 3, 4}, {10, 11, 12, 13}};
  Series b{"actual", {1, 2, 3, 4}, {9, 11, 13, 12}};
  ChartOptions opts;
  opts.x_label = "day";
  write_series_csv(dir / "p.csv", {a, b}, opts);
  const auto csv = read_text(dir / "p.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "day,predicted,actual");
  Series c{"other", {1, 2, 3, 5}, {1, 1, 1, 1}};
  EXPECT_THROW(write_series_csv(dir / "q.csv", {a, c}, opts), DomainError);
}

TEST(Plots, EmptyOrInvalidSeriesRejected) {
  EXPECT_THROW(line_chart_svg({}, {}), DomainError);
  EXPECT_THROW(line_chart_svg({{"e", {}, {}}}, {}), DomainError);
  EXPECT_THROW(line_chart_svg({{"r", {1, 2}, {1}}}, {}), DomainError);
}

TEST(Plots, NamesAreEscaped) {
  const auto svg = line_chart_svg({{"a<b&\"c\"", {0, 1}, {0, 1}}}, {});
  EXPECT_NE(svg.find("a&lt;b&amp;&quot;c&quot;"), std::string::npos);
}
