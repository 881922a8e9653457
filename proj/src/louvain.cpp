// Louvain modularity optimisation on small dense graphs.

#include <algorithm>
#include <cmath>
#include <random>

#include "qdcca/error.hpp"
#include "qdcca/netgraph.hpp"

namespace qdcca {

namespace {

constexpr double kGainTolerance = 1e-12;

struct Level {
  std::size_t n = 0;
  std::vector<double> w;  // dense, symmetric, diagonal = self loops
};

// Local moving phase. Returns true if any node changed community.
bool move_nodes(const Level& g, double resolution, std::mt19937_64& rng,
                std::vector<std::size_t>& comm) {
  const std::size_t n = g.n;
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += g.w[i * n + j];
    two_m += k[i];
  }
  std::vector<double> tot(n, 0.0);
  std::vector<std::size_t> members(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    tot[comm[i]] += k[i];
    ++members[comm[i]];
  }

  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  std::vector<std::size_t> ties;
  bool any_move = false;

  for (int sweep = 0; sweep < 1000; ++sweep) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t own = comm[i];
      touched.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || g.w[i * n + j] <= 0.0) continue;
        if (link[comm[j]] == 0.0) touched.push_back(comm[j]);
        link[comm[j]] += g.w[i * n + j];
      }
      tot[own] -= k[i];
      --members[own];

      const double scale = resolution * k[i] / two_m;
      std::size_t best = own;
      double best_gain = link[own] - scale * tot[own];
      ties.clear();
      std::sort(touched.begin(), touched.end());
      for (std::size_t c : touched) {
        if (c == own) continue;
        const double gain = link[c] - scale * tot[c];
        if (gain > best_gain + kGainTolerance) {
          best = c;
          best_gain = gain;
          ties.assign(1, c);
        } else if (best != own && std::fabs(gain - best_gain) <= kGainTolerance) {
          ties.push_back(c);
        }
      }
      if (ties.size() > 1) best = ties[rng() % ties.size()];
      // Leaving for an empty community scores zero.
      if (best == own && best_gain < -kGainTolerance && members[own] > 0) {
        for (std::size_t c = 0; c < n; ++c)
          if (members[c] == 0 && c != own) {
            best = c;
            break;
          }
      }

      tot[best] += k[i];
      ++members[best];
      comm[i] = best;
      if (best != own) moved = true;
      for (std::size_t c : touched) link[c] = 0.0;
    }
    if (!moved) break;
    any_move = true;
  }
  return any_move;
}

// Relabels communities 0..count-1 in order of first appearance.
std::size_t compact(std::vector<std::size_t>& comm) {
  std::vector<std::size_t> remap(comm.size(), comm.size());
  std::size_t next = 0;
  for (auto& c : comm) {
    if (remap[c] == comm.size()) remap[c] = next++;
    c = remap[c];
  }
  return next;
}

}  // namespace

double modularity(std::span<const double> weights, std::size_t n,
                  std::span<const std::size_t> community, double resolution) {
  if (weights.size() != n * n || community.size() != n)
    throw Error(ErrorKind::kDimensionMismatch, "modularity inputs have inconsistent sizes");
  std::size_t count = 0;
  for (std::size_t c : community) count = std::max(count, c + 1);
  std::vector<double> inside(count, 0.0), tot(count, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights[i * n + j];
      two_m += w;
      tot[community[i]] += w;
      if (community[i] == community[j]) inside[community[i]] += w;
    }
  if (two_m <= 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t c = 0; c < count; ++c)
    q += inside[c] / two_m - resolution * (tot[c] / two_m) * (tot[c] / two_m);
  return q;
}

Partition louvain_weights(std::span<const double> weights, std::size_t n, double resolution,
                          std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::kDimensionMismatch, "community detection needs two nodes");
  if (weights.size() != n * n)
    throw Error(ErrorKind::kDimensionMismatch, "weight matrix has inconsistent size");

  Level g;
  g.n = n;
  g.w.assign(weights.begin(), weights.end());
  bool any_positive = false;
  for (std::size_t i = 0; i < n; ++i) {
    g.w[i * n + i] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(g.w[i * n + j] >= 0.0))
        throw Error(ErrorKind::kInvalidConfig, "Louvain weights must be nonnegative");
      if (g.w[i * n + j] > 0.0) any_positive = true;
    }
  }
  const std::vector<double> base = g.w;

  Partition p;
  p.community.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.community[i] = i;
  p.community_count = n;
  if (!any_positive) {
    p.all_zero_weights = true;
    p.history.push_back(0.0);
    return p;
  }

  std::mt19937_64 rng(seed);
  p.modularity = modularity(base, n, p.community, resolution);
  p.history.push_back(p.modularity);

  while (true) {
    std::vector<std::size_t> comm(g.n);
    for (std::size_t i = 0; i < g.n; ++i) comm[i] = i;
    if (!move_nodes(g, resolution, rng, comm)) break;
    const std::size_t count = compact(comm);
    for (auto& c : p.community) c = comm[c];
    p.community_count = count;
    p.modularity = modularity(base, n, p.community, resolution);
    p.history.push_back(p.modularity);
    if (count == g.n) break;

    Level next;
    next.n = count;
    next.w.assign(count * count, 0.0);
    for (std::size_t i = 0; i < g.n; ++i)
      for (std::size_t j = 0; j < g.n; ++j) next.w[comm[i] * count + comm[j]] += g.w[i * g.n + j];
    g = std::move(next);
  }
  return p;
}

Partition louvain(const CorrelationMatrix& c, double resolution, std::uint64_t seed) {
  std::vector<double> w(c.entries.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::max(c.entries[i], 0.0);
  Partition p = louvain_weights(w, c.dim, resolution, seed);
  p.labels = c.labels;
  return p;
}

}  // namespace qdcca
