#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "oracles/gen.hpp"
#include "oracles/graphs.hpp"
#include "qdcca/netgraph.hpp"
#include "test_util.hpp"

using namespace qdcca;

namespace {

DistanceMatrix distances(std::size_t n, const std::vector<double>& d) {
  DistanceMatrix m;
  m.dim = n;
  m.entries = d;
  for (std::size_t i = 0; i < n; ++i) m.labels.push_back("N" + std::to_string(i));
  return m;
}

SpanningTree tree(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  SpanningTree t;
  t.node_count = n;
  for (std::size_t i = 0; i < n; ++i) t.labels.push_back("N" + std::to_string(i));
  for (auto [a, b] : edges) t.edges.push_back({std::min(a, b), std::max(a, b), 1.0, 0.5});
  return t;
}

SpanningTree star(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(0, i);
  return tree(n, e);
}

SpanningTree path(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(i - 1, i);
  return tree(n, e);
}

SpanningTree random_tree(gen::Rng& rng, std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(rng.index(0, i - 1), i);
  return tree(n, e);
}

/// Preferential attachment: each new node links to an existing one with
/// probability proportional to its degree.
SpanningTree preferential_tree(gen::Rng& rng, std::size_t n) {
  std::vector<std::size_t> ends{0, 1};
  std::vector<std::pair<std::size_t, std::size_t>> e{{0, 1}};
  for (std::size_t i = 2; i < n; ++i) {
    const std::size_t target = ends[rng.index(0, ends.size() - 1)];
    e.emplace_back(target, i);
    ends.push_back(target);
    ends.push_back(i);
  }
  return tree(n, e);
}

std::vector<double> random_distances(gen::Rng& rng, std::size_t n) {
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = rng.uniform(0.0, 2.0);
  return d;
}

std::set<oracle::Edge> edge_set(const SpanningTree& t) {
  std::set<oracle::Edge> s;
  for (const auto& e : t.edges) s.emplace(e.a, e.b);
  return s;
}

}  // namespace

TEST(DistanceMatrix, Examples) {
  CorrelationMatrix c;
  c.dim = 3;
  c.entries = {1, 0, -1, 0, 1, 0.5, -1, 0.5, 1};
  c.labels = {"a", "b", "c"};
  const auto d = distance_matrix(c);
  EXPECT_EQ(d.at(0, 0), 0.0);
  EXPECT_NEAR(d.at(0, 1), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d.at(0, 1), 1.41421, 1e-5);
  EXPECT_EQ(d.at(0, 2), 2.0);
  EXPECT_EQ(d.at(1, 2), 1.0);
  EXPECT_EQ(d.clamped, 0u);
}

TEST(DistanceMatrix, ClampsAboveOne) {
  CorrelationMatrix c;
  c.dim = 2;
  c.entries = {1, 1.2, 1.2, 1};
  c.labels = {"a", "b"};
  const auto d = distance_matrix(c);
  EXPECT_EQ(d.at(0, 1), 0.0);
  EXPECT_EQ(d.clamped, 1u);
}

TEST(DistanceMatrix, MetricRange) {
  gen::Rng rng(1);
  CorrelationMatrix c;
  c.dim = 12;
  c.entries = rng.symmetric(12, -1.0, 1.0);
  c.labels.assign(12, "x");
  const auto d = distance_matrix(c);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) {
      EXPECT_GE(d.at(i, j), 0.0);
      EXPECT_LE(d.at(i, j), 2.0);
      EXPECT_EQ(d.at(i, j), d.at(j, i));
    }
}

TEST(MinimumSpanningTree, ThreeNodes) {
  const auto t = minimum_spanning_tree(distances(3, {0, 0.1, 0.2, 0.1, 0, 0.9, 0.2, 0.9, 0}));
  EXPECT_EQ(edge_set(t), (std::set<oracle::Edge>{{0, 1}, {0, 2}}));
  EXPECT_NEAR(t.total_weight(), 0.3, 1e-15);
}

TEST(MinimumSpanningTree, HubBecomesStar) {
  const std::size_t n = 9;
  std::vector<double> d(n * n, 1.5);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (j != 4) d[4 * n + j] = d[j * n + 4] = 1e-3;
  const auto t = minimum_spanning_tree(distances(n, d));
  EXPECT_EQ(t.degrees()[4], n - 1);
}

TEST(MinimumSpanningTree, TiesBrokenByLabelOrder) {
  std::vector<double> d(16, 1.0);
  for (int i = 0; i < 4; ++i) d[i * 4 + i] = 0.0;
  const auto t = minimum_spanning_tree(distances(4, d));
  EXPECT_EQ(edge_set(t), (std::set<oracle::Edge>{{0, 1}, {0, 2}, {0, 3}}));
}

TEST(MinimumSpanningTree, MatchesExhaustiveEnumeration) {
  gen::Rng rng(2);
  std::size_t trees = 0;
  oracle::for_each_tree(7, [&](const auto&) { ++trees; });
  EXPECT_EQ(trees, 16807u);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = random_distances(rng, 7);
    const auto t = minimum_spanning_tree(distances(7, d));
    const auto [best, arg] = oracle::brute_force_mst(d, 7);
    EXPECT_EQ(t.total_weight(), best);
    EXPECT_EQ(edge_set(t), arg);
  }
}

TEST(MinimumSpanningTree, EdgeSetInvariantUnderSquaring) {
  gen::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = rng.index(2, 30);
    auto d = random_distances(rng, n);
    const auto t = minimum_spanning_tree(distances(n, d));
    for (auto& v : d) v *= v;
    EXPECT_EQ(edge_set(minimum_spanning_tree(distances(n, d))), edge_set(t));
  }
}

TEST(MinimumSpanningTree, CompanionRho) {
  CorrelationMatrix c;
  c.dim = 3;
  c.entries = {1, 0.9, 0.1, 0.9, 1, 0.2, 0.1, 0.2, 1};
  c.labels = {"a", "b", "c"};
  const auto t = minimum_spanning_tree(distance_matrix(c));
  ASSERT_EQ(t.edges.size(), 2u);
  EXPECT_EQ(t.edges[0].rho + t.edges[1].rho, 0.9 + 0.2);
}

TEST(DegreeDistribution, StarAndPath) {
  const auto s = degree_distribution(star(5));
  EXPECT_EQ(s.degrees, (std::vector<std::size_t>{4, 1, 1, 1, 1}));
  ASSERT_EQ(s.points.size(), 2u);
  EXPECT_EQ(s.points[0].degree, 1.0);
  EXPECT_EQ(s.points[0].probability, 1.0);
  EXPECT_DOUBLE_EQ(s.points[1].probability, 0.2);
  const auto p = degree_distribution(path(4));
  EXPECT_EQ(p.points[1].degree, 2.0);
  EXPECT_DOUBLE_EQ(p.points[1].probability, 0.5);
}

TEST(DegreeDistribution, HandshakeAndMonotone) {
  gen::Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = rng.index(2, 60);
    const auto dd = degree_distribution(random_tree(rng, n));
    std::size_t sum = 0;
    for (auto k : dd.degrees) sum += k;
    EXPECT_EQ(sum, 2 * (n - 1));
    EXPECT_EQ(dd.points.front().probability, 1.0);
    for (std::size_t i = 1; i < dd.points.size(); ++i)
      EXPECT_LT(dd.points[i].probability, dd.points[i - 1].probability);
  }
}

TEST(PowerLawFit, ExactPowerLaw) {
  DegreeDistribution dd;
  for (int k = 1; k <= 10; ++k) dd.points.push_back({double(k), std::pow(double(k), -1.5)});
  const auto fit = powerlaw_fit(dd);
  ASSERT_TRUE(fit);
  EXPECT_NEAR(fit->gamma, 1.5, 1e-12);
  EXPECT_LT(fit->standard_error, 1e-12);
  EXPECT_EQ(fit->support, 10u);
}

TEST(PowerLawFit, StarIsNotFittable) { EXPECT_FALSE(powerlaw_fit(degree_distribution(star(12)))); }

TEST(PowerLawFit, PreferentialTreesAgainstIndependentRegression) {
  gen::Rng rng(5);
  int fitted = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto dd = degree_distribution(preferential_tree(rng, 80));
    const auto fit = powerlaw_fit(dd);
    if (!fit) continue;
    ++fitted;
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : dd.points) {
      const double x = std::log(p.degree), y = std::log(p.probability);
      n += 1;
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    double ssr = 0;
    for (const auto& p : dd.points) {
      const double r = std::log(p.probability) - icept - slope * std::log(p.degree);
      ssr += r * r;
    }
    const double se = std::sqrt(ssr / (n - 2) / (sxx - sx * sx / n));
    EXPECT_NEAR(fit->gamma, std::fabs(slope), 1e-9);
    EXPECT_NEAR(fit->standard_error, se, 1e-9);
    EXPECT_LE(std::fabs(fit->gamma - std::fabs(slope)), 3 * se + 1e-12);
  }
  EXPECT_GT(fitted, 90);
}

TEST(MeanPathLength, ClosedForms) {
  EXPECT_DOUBLE_EQ(mean_path_length(star(80)), 2.0 * 79.0 / 80.0);
  EXPECT_DOUBLE_EQ(mean_path_length(star(80)), 1.975);
  EXPECT_DOUBLE_EQ(mean_path_length(path(4)), 10.0 / 6.0);
}

TEST(MeanPathLength, MatchesFloydWarshall) {
  gen::Rng rng(6);
  const double inf = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = rng.index(2, 9);
    auto t = random_tree(rng, n);
    for (auto& e : t.edges) e.distance = rng.uniform(0.1, 2.0);
    for (auto weighting : {PathWeighting::kHops, PathWeighting::kDistance}) {
      std::vector<double> d(n * n, inf);
      for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
      for (const auto& e : t.edges) {
        const double w = weighting == PathWeighting::kHops ? 1.0 : e.distance;
        d[e.a * n + e.b] = d[e.b * n + e.a] = w;
      }
      const auto all = oracle::floyd_warshall(d, n);
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) sum += all[i * n + j];
      const double want = sum / (n * (n - 1) / 2.0);
      if (weighting == PathWeighting::kHops)
        EXPECT_EQ(mean_path_length(t, weighting), want);
      else
        EXPECT_NEAR(mean_path_length(t, weighting), want, 1e-12);
    }
    const double hops = mean_path_length(t);
    EXPECT_GE(hops, 1.0);
    EXPECT_LE(hops, (n + 1) / 3.0 + 1e-12);
  }
}

TEST(ClusterTrack, Examples) {
  Partition a;
  a.labels = {"BTC", "ETH", "XRP", "ADA"};
  a.community = {0, 0, 1, 1};
  a.community_count = 2;
  Partition b = a;
  b.community = {0, 1, 1, 2};
  b.community_count = 3;
  Partition c = a;
  c.community = {2, 0, 0, 1};
  const std::vector<Partition> parts{a, b, c};
  const auto track = cluster_track(parts, "BTC");
  EXPECT_EQ(track.rows[0], (std::vector<bool>{true, true, false, false}));
  EXPECT_EQ(track.rows[1], (std::vector<bool>{true, false, false, false}));
  EXPECT_EQ(track.rows[2], (std::vector<bool>{true, false, false, false}));
  const auto xrp = cluster_track(parts, "XRP");
  EXPECT_EQ(xrp.rows[1], (std::vector<bool>{false, true, true, false}));
  EXPECT_ERROR_KIND(cluster_track(parts, "DOGE"), ErrorKind::kUnknownAnchor);
  Partition d = a;
  d.labels[3] = "SOL";
  const std::vector<Partition> mixed{a, d};
  EXPECT_ERROR_KIND(cluster_track(mixed, "BTC"), ErrorKind::kDimensionMismatch);
}
