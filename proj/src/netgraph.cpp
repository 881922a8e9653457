#include "qdcca/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "qdcca/error.hpp"

namespace qdcca {

DistanceMatrix distance_matrix(const CorrelationMatrix& c) {
  DistanceMatrix d;
  d.dim = c.dim;
  d.labels = c.labels;
  d.rho = c.entries;
  d.entries.assign(c.dim * c.dim, 0.0);
  for (std::size_t i = 0; i < c.dim; ++i)
    for (std::size_t j = 0; j < c.dim; ++j) {
      if (i == j) continue;
      double radicand = 2.0 * (1.0 - c.at(i, j));
      if (radicand < 0.0) {
        radicand = 0.0;
        if (i < j) ++d.clamped;
      }
      d.entries[i * c.dim + j] = std::sqrt(radicand);
    }
  return d;
}

std::vector<std::vector<std::size_t>> SpanningTree::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(node_count);
  for (const auto& e : edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  return adj;
}

std::vector<std::size_t> SpanningTree::degrees() const {
  std::vector<std::size_t> k(node_count, 0);
  for (const auto& e : edges) {
    ++k[e.a];
    ++k[e.b];
  }
  return k;
}

double SpanningTree::total_weight() const {
  double w = 0.0;
  for (const auto& e : edges) w += e.distance;
  return w;
}

namespace {

using EdgeKey = std::tuple<double, std::size_t, std::size_t>;

EdgeKey edge_key(const DistanceMatrix& d, std::size_t u, std::size_t v) {
  return {d.at(u, v), std::min(u, v), std::max(u, v)};
}

}  // namespace

SpanningTree minimum_spanning_tree(const DistanceMatrix& d) {
  const std::size_t n = d.dim;
  if (n < 2) throw Error(ErrorKind::kDimensionMismatch, "a spanning tree needs two nodes");
  for (double w : d.entries)
    if (!std::isfinite(w)) throw Error(ErrorKind::kNonFinite, "distance matrix has a non-finite entry");

  SpanningTree tree;
  tree.node_count = n;
  tree.labels = d.labels;
  tree.edges.reserve(n - 1);

  std::vector<bool> in_tree(n, false);
  std::vector<std::size_t> parent(n, 0);
  std::vector<EdgeKey> best(n);
  in_tree[0] = true;
  for (std::size_t v = 1; v < n; ++v) best[v] = edge_key(d, 0, v);

  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v] && (next == n || best[v] < best[next])) next = v;
    in_tree[next] = true;
    const std::size_t a = std::min(parent[next], next);
    const std::size_t b = std::max(parent[next], next);
    tree.edges.push_back({a, b, d.at(a, b), d.rho.empty() ? 1.0 - 0.5 * d.at(a, b) * d.at(a, b)
                                                          : d.rho[a * n + b]});
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const EdgeKey cand = edge_key(d, next, v);
      if (cand < best[v]) {
        best[v] = cand;
        parent[v] = next;
      }
    }
  }
  std::sort(tree.edges.begin(), tree.edges.end(), [](const TreeEdge& x, const TreeEdge& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  return tree;
}

DegreeDistribution degree_distribution(const SpanningTree& t) {
  DegreeDistribution dd;
  dd.degrees = t.degrees();
  if (dd.degrees.empty()) return dd;
  std::vector<std::size_t> sorted = dd.degrees;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    // nodes with degree >= sorted[i] are exactly those from position i on
    dd.points.push_back({static_cast<double>(sorted[i]),
                         static_cast<double>(sorted.size() - i) / n});
  }
  return dd;
}

std::optional<PowerLawFit> powerlaw_fit(const DegreeDistribution& dd) {
  std::vector<double> x, y;
  for (const auto& p : dd.points) {
    if (p.degree >= 1.0 && p.probability > 0.0) {
      x.push_back(std::log(p.degree));
      y.push_back(std::log(p.probability));
    }
  }
  const std::size_t n = x.size();
  if (n < 3) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - intercept - slope * x[i];
    ssr += r * r;
  }
  PowerLawFit fit;
  fit.gamma = std::fabs(slope);
  fit.standard_error = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  fit.support = n;
  return fit;
}

double mean_path_length(const SpanningTree& t, PathWeighting weighting) {
  const std::size_t n = t.node_count;
  if (n < 2) return 0.0;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const auto& e : t.edges) {
    const double w = weighting == PathWeighting::kHops ? 1.0 : e.distance;
    adj[e.a].push_back({e.b, w});
    adj[e.b].push_back({e.a, w});
  }
  double total = 0.0;
  std::vector<double> dist(n);
  std::vector<bool> seen(n);
  std::vector<std::size_t> queue;
  queue.reserve(n);
  for (std::size_t src = 0; src < n; ++src) {
    std::fill(seen.begin(), seen.end(), false);
    queue.assign(1, src);
    dist[src] = 0.0;
    seen[src] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t u = queue[head];
      for (const auto& [v, w] : adj[u]) {
        if (seen[v]) continue;
        seen[v] = true;
        dist[v] = dist[u] + w;
        queue.push_back(v);
      }
    }
    for (std::size_t dst = src + 1; dst < n; ++dst) total += dist[dst];
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return total / pairs;
}

CoMembership cluster_track(std::span<const Partition> partitions, const std::string& anchor) {
  CoMembership out;
  if (partitions.empty()) return out;
  out.labels = partitions.front().labels;
  const auto it = std::find(out.labels.begin(), out.labels.end(), anchor);
  if (it == out.labels.end())
    throw Error(ErrorKind::kUnknownAnchor, "anchor '" + anchor + "' is not a node label");
  const auto a = static_cast<std::size_t>(it - out.labels.begin());
  for (const auto& p : partitions) {
    if (p.labels != out.labels || p.community.size() != out.labels.size())
      throw Error(ErrorKind::kDimensionMismatch, "partitions have different node sets");
    std::vector<bool> row(out.labels.size());
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = p.community[j] == p.community[a];
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace qdcca
