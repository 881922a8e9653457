#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "oracles/gen.hpp"
#include "qdcca/quotes.hpp"
#include "test_util.hpp"

using namespace qdcca;

namespace {

QuoteSeries series(const std::string& name, const std::vector<std::int64_t>& t,
                   const std::vector<double>& p) {
  return {name, t, p};
}

QuoteSeries minutes_except(const std::string& name, std::int64_t length,
                           const std::vector<std::pair<std::int64_t, std::int64_t>>& holidays) {
  QuoteSeries s{name, {}, {}};
  for (std::int64_t m = 0; m < length; ++m) {
    bool closed = false;
    for (auto [a, b] : holidays) closed |= (m >= a && m < b);
    if (!closed) {
      s.timestamps.push_back(m);
      s.prices.push_back(100.0 + static_cast<double>(m));
    }
  }
  return s;
}

}  // namespace

TEST(ParseQuotes, ThreeLines) {
  const auto q = parse_quotes("timestamp,price\n0,100\n60,101\n120,99\n", "X");
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q[0].ticker, "X");
  EXPECT_EQ(q[0].size(), 3u);
  EXPECT_EQ(q[0].timestamps, (std::vector<std::int64_t>{0, 1, 2}));
  EXPECT_EQ(q[0].prices, (std::vector<double>{100, 101, 99}));
}

TEST(ParseQuotes, TimestampFormats) {
  EXPECT_EQ(parse_timestamp("2020-01-01T00:00Z"), 26297280);
  EXPECT_EQ(parse_timestamp("2020-01-01 00:01:30"), 26297281);
  EXPECT_EQ(parse_timestamp("1577836800"), 26297280);
  EXPECT_EQ(parse_timestamp("1577836800000"), 26297280);
  EXPECT_EQ(format_timestamp(26297280), "2020-01-01T00:00Z");
  EXPECT_ERROR_KIND(parse_timestamp("yesterday"), ErrorKind::kParse);
  EXPECT_ERROR_KIND(parse_timestamp("2020-02-30T00:00Z"), ErrorKind::kParse);
}

TEST(ParseQuotes, WideFileWithGaps) {
  const auto q = parse_quotes("timestamp,BTC,ETH\n0,1,2\n60,,3\n120,4,\n", "wide");
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q[0].ticker, "BTC");
  EXPECT_EQ(q[0].timestamps, (std::vector<std::int64_t>{0, 2}));
  EXPECT_EQ(q[1].timestamps, (std::vector<std::int64_t>{0, 1}));
}

TEST(ParseQuotes, ErrorsNameTheLine) {
  try {
    parse_quotes("timestamp,price\n0,100\n60,0\n", "X");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonPositivePrice);
    EXPECT_NE(std::string(e.what()).find("X:3"), std::string::npos) << e.what();
  }
  EXPECT_ERROR_KIND(parse_quotes("0,100\n0,101\n", "X"), ErrorKind::kUnsortedTimestamps);
  EXPECT_ERROR_KIND(parse_quotes("60,100\n0,101\n", "X"), ErrorKind::kUnsortedTimestamps);
  EXPECT_ERROR_KIND(parse_quotes("0,abc\n", "X"), ErrorKind::kParse);
  EXPECT_ERROR_KIND(parse_quotes("", "X"), ErrorKind::kParse);
}

TEST(LoadQuotes, DirectoryOfTickers) {
  const auto dir = std::filesystem::temp_directory_path() / "qdcca_load_quotes";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "ZZZ.csv") << "timestamp,price\n0,1\n60,2\n";
  std::ofstream(dir / "AAA.csv") << "timestamp,price\n0,3\n60,4\n";
  const auto q = load_quotes(dir);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q[0].ticker, "AAA");
  EXPECT_EQ(q[1].ticker, "ZZZ");
  EXPECT_ERROR_KIND(load_quotes(dir / "missing.csv"), ErrorKind::kIo);
  std::filesystem::remove_all(dir);
}

TEST(LogReturns, Examples) {
  const auto r = log_returns(series("X", {0, 1, 2}, {1.0, std::exp(1.0), std::exp(2.0)}));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], 1.0, 1e-15);
  EXPECT_NEAR(r[1], 1.0, 1e-15);
  for (double v : log_returns(series("X", {0, 1, 2, 3}, {5, 5, 5, 5}))) EXPECT_EQ(v, 0.0);
  EXPECT_NEAR(log_returns(series("X", {0, 1}, {100, 101}))[0], 0.00995033, 1e-8);
  EXPECT_ERROR_KIND(log_returns(series("X", {0}, {1})), ErrorKind::kInvalidConfig);
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize(std::vector<double>{1, -1}), (std::vector<double>{1, -1}));
  EXPECT_ERROR_KIND(normalize(std::vector<double>{5, 5, 5}), ErrorKind::kZeroVariance);
}

TEST(Normalize, MomentsAndIdempotence) {
  gen::Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = rng.rough(rng.index(2, 5000));
    const auto z = normalize(x);
    double mean = 0, var = 0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    for (double v : z) var += (v - mean) * (v - mean);
    var /= static_cast<double>(z.size());
    EXPECT_LT(std::fabs(mean), 1e-12);
    EXPECT_LT(std::fabs(var - 1.0), 1e-9);
    const auto zz = normalize(z);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(zz[i], z[i], 1e-12);
  }
}

TEST(Rebase, Examples) {
  const auto r = rebase_prices(series("ALT", {0}, {300}), series("BTC", {0}, {60000}));
  EXPECT_EQ(r.prices[0], 0.005);
  const auto self = series("BTC", {0, 1, 2}, {5, 6, 7});
  for (double p : rebase_prices(self, self).prices) EXPECT_EQ(p, 1.0);
  EXPECT_ERROR_KIND(normalize(log_returns(rebase_prices(self, self))), ErrorKind::kZeroVariance);
  EXPECT_ERROR_KIND(rebase_prices(series("A", {0, 1}, {1, 1}), series("B", {2, 3}, {1, 1})),
                    ErrorKind::kEmptyIntersection);
}

TEST(Rebase, ConsistencyOnIntersection) {
  gen::Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    QuoteSeries a{"A", {}, {}}, b{"B", {}, {}};
    for (std::int64_t t = 0; t < 200; ++t) {
      if (rng.uniform(0, 1) < 0.8) a.timestamps.push_back(t), a.prices.push_back(std::exp(rng.normal() * 3));
      if (rng.uniform(0, 1) < 0.8) b.timestamps.push_back(t), b.prices.push_back(std::exp(rng.normal() * 3));
    }
    const auto r = rebase_prices(a, b);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const auto ia = std::lower_bound(a.timestamps.begin(), a.timestamps.end(), r.timestamps[k]);
      const auto ib = std::lower_bound(b.timestamps.begin(), b.timestamps.end(), r.timestamps[k]);
      ASSERT_EQ(*ia, r.timestamps[k]);
      ASSERT_EQ(*ib, r.timestamps[k]);
      const double pa = a.prices[ia - a.timestamps.begin()];
      const double pb = b.prices[ib - b.timestamps.begin()];
      const double back = r.prices[k] * pb;
      EXPECT_LE(std::fabs(back - pa), std::nextafter(pa, INFINITY) - pa);
    }
  }
}

TEST(AlignSeries, IdenticalGridsUnchanged) {
  const auto a = series("A", {0, 1, 2}, {1, 2, 3});
  const auto b = series("B", {0, 1, 2}, {4, 5, 6});
  const std::vector<QuoteSeries> in{a, b};
  const auto al = align_series(in);
  EXPECT_EQ(al.timestamps, a.timestamps);
  EXPECT_EQ(al.prices, (std::vector<double>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(al.retention, (std::vector<double>{1.0, 1.0}));
}

TEST(AlignSeries, WeekdayMarketAgainstAroundTheClock) {
  const std::int64_t week = 7 * 1440;
  const auto crypto = minutes_except("C", 2 * week, {});
  const auto stock = minutes_except("S", 2 * week, {{5 * 1440, week}, {week + 5 * 1440, 2 * week}});
  const std::vector<QuoteSeries> in{crypto, stock};
  const auto al = align_series(in);
  EXPECT_EQ(al.cols(), 10u * 1440u);
  for (auto t : al.timestamps) EXPECT_LT(t % week, 5 * 1440);
  EXPECT_DOUBLE_EQ(al.retention[0], 10.0 / 14.0);
  EXPECT_EQ(al.retention[1], 1.0);
}

TEST(AlignSeries, StaggeredHolidays) {
  const std::vector<QuoteSeries> in{minutes_except("A", 100, {{10, 20}}),
                                    minutes_except("B", 100, {{15, 35}}),
                                    minutes_except("C", 100, {{50, 60}, {90, 100}})};
  // Open minutes: 0-9, 35-49, 60-89.
  std::vector<std::int64_t> expected;
  for (std::int64_t m = 0; m < 10; ++m) expected.push_back(m);
  for (std::int64_t m = 35; m < 50; ++m) expected.push_back(m);
  for (std::int64_t m = 60; m < 90; ++m) expected.push_back(m);
  const auto al = align_series(in);
  EXPECT_EQ(al.timestamps, expected);
  EXPECT_EQ(al.cols(), 55u);
  EXPECT_DOUBLE_EQ(al.retention[0], 55.0 / 90.0);
  EXPECT_DOUBLE_EQ(al.retention[1], 55.0 / 80.0);
  EXPECT_DOUBLE_EQ(al.retention[2], 55.0 / 80.0);
  for (std::size_t k = 0; k < al.cols(); ++k)
    for (std::size_t i = 0; i < 3; ++i)
      EXPECT_EQ(al.prices[i * al.cols() + k], 100.0 + static_cast<double>(expected[k]));
}

TEST(AlignSeries, Errors) {
  const std::vector<QuoteSeries> one{series("A", {0}, {1})};
  EXPECT_ERROR_KIND(align_series(one), ErrorKind::kDimensionMismatch);
  const std::vector<QuoteSeries> disjoint{series("A", {0}, {1}), series("B", {1}, {1})};
  EXPECT_ERROR_KIND(align_series(disjoint), ErrorKind::kEmptyIntersection);
}

TEST(AlignContinuous, ForwardFillsAndMarks) {
  const std::vector<QuoteSeries> in{series("A", {0, 1, 2, 3, 4}, {1, 2, 3, 4, 5}),
                                    series("B", {1, 3, 4, 5}, {10, 30, 40, 50})};
  const auto al = align_continuous(in);
  EXPECT_EQ(al.timestamps, (std::vector<std::int64_t>{1, 2, 3, 4}));
  EXPECT_EQ(al.prices, (std::vector<double>{2, 3, 4, 5, 10, 10, 30, 40}));
  EXPECT_EQ(al.filled, (std::vector<std::uint8_t>{0, 0, 0, 0, 0, 1, 0, 0}));
  const auto r = build_returns(al);
  EXPECT_EQ(r.cols(), 3u);
  EXPECT_EQ(r.timestamps, (std::vector<std::int64_t>{2, 3, 4}));
  EXPECT_EQ(r.values[3], 0.0);
  EXPECT_EQ(r.filled, (std::vector<std::uint8_t>{0, 0, 0, 1, 0, 0}));
}
