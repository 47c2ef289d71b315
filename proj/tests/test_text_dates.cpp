#include "sentilag/csv.hpp"
#include "sentilag/dates.hpp"
#include "sentilag/error.hpp"
#include "sentilag/text.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sentilag;

TEST(Text, StripsControlCharacters) {
  EXPECT_EQ(text::clean(std::string("涨\0了", 7)), "涨了");
  EXPECT_EQ(text::clean("a\tb\r\n  c "), "a b c");
  EXPECT_EQ(text::clean("\x7f\x1b[0m"), "[0m");
}

TEST(Text, DropsMalformedUtf8AndSurrogates) {
  // lone continuation byte, truncated sequence, encoded surrogate U+D800
  EXPECT_EQ(text::clean("a\x80z"), "az");
  EXPECT_EQ(text::clean("a\xe6\xb6"), "a");
  EXPECT_EQ(text::clean("x\xed\xa0\x80y"), "xy");
  EXPECT_TRUE(text::is_valid_utf8(text::clean("\xff\xfe恒生")));
}

TEST(Text, NormalizesToNfc) {
  // e + combining acute -> precomposed
  EXPECT_EQ(text::clean("caf\x65\xcc\x81"), "caf\xc3\xa9");
}

TEST(Text, CleanIsIdempotentOnRandomBytes) {
  std::mt19937_64 rng(3);
  const std::vector<std::string> pieces = {"恒", "生", " ", "\t", "\x01", "\xcc\x81", "e", "\x80", "\xed\xa0\x80",
                                           "😀", "A", "　", "\n"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      s += pieces[rng() % pieces.size()];
    }
    const auto once = text::clean(s);
    EXPECT_EQ(text::clean(once), once);
    EXPECT_TRUE(text::is_valid_utf8(once));
  }
}

TEST(Text, FoldedContainment) {
  EXPECT_TRUE(text::contains_folded("Today the HANG SENG Index fell", "hang seng index"));
  EXPECT_TRUE(text::contains_folded("hang seng index", "HANG SENG INDEX"));
  EXPECT_FALSE(text::contains_folded("hang seng", "hang seng index"));
  EXPECT_TRUE(text::contains_folded("今天恒生指数大涨", "恒生指数"));
  EXPECT_TRUE(text::contains_folded("STRASSE", "straße"));
}

TEST(Csv, SplitHandlesQuotes) {
  const auto f = csv::split(R"(a,"b,c","d""e",)");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[1], "b,c");
  EXPECT_EQ(f[2], "d\"e");
  EXPECT_EQ(f[3], "");
  EXPECT_EQ(csv::escape("x,y"), "\"x,y\"");
}

TEST(Csv, NumberRoundTrips) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(csv::parse_double(csv::number(v)), v);
  }
  EXPECT_THROW(csv::parse_double("nan"), Error);
  EXPECT_THROW(csv::parse_double("12x"), Error);
  EXPECT_THROW(csv::parse_int("1.5"), Error);
}

TEST(Dates, CivilRoundTrip) {
  for (int days = -719162; days < 2932896; days += 997) {  // years 0001..9999
    const Date d{days};
    EXPECT_EQ(Date::parse(d.iso()), d);
  }
  EXPECT_EQ(Date::from_ymd(1970, 1, 1).days, 0);
  EXPECT_EQ(Date::from_ymd(2018, 1, 1).weekday(), 0);  // Monday
  EXPECT_TRUE(Date::from_ymd(2018, 1, 6).is_weekend());
  EXPECT_THROW(Date::parse("2018-02-30"), Error);
  EXPECT_THROW(Date::parse("2018-1-3"), Error);
}

TEST(Dates, TimestampsRespectOffset) {
  const TzOffset hk{480};
  const auto a = Timestamp::parse("2018-01-01T23:30:00+08:00", hk);
  const auto b = Timestamp::parse("2018-01-01T15:30:00Z", hk);
  const auto c = Timestamp::parse("2018-01-01 23:30", hk);
  EXPECT_EQ(a.seconds, b.seconds);
  EXPECT_EQ(a.seconds, c.seconds);
  EXPECT_EQ(a.local_date(hk), Date::from_ymd(2018, 1, 1));
  EXPECT_EQ(a.local_date(TzOffset{600}), Date::from_ymd(2018, 1, 2));
  EXPECT_EQ(Timestamp::parse(a.iso(hk), hk).seconds, a.seconds);
  EXPECT_THROW(Timestamp::parse("yesterday", hk), Error);
}
