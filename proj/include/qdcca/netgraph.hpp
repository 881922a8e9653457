#pragma once

// Asset networks built from detrended correlation matrices: metric
// distances, minimum spanning trees and their topology, and Louvain
// communities on the complete weighted graph.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdcca/spectra.hpp"

namespace qdcca {

struct DistanceMatrix {
  std::size_t dim = 0;
  std::vector<double> entries;  ///< row-major, zero diagonal
  std::vector<std::string> labels;
  /// Source correlations when built by distance_matrix(); empty otherwise.
  std::vector<double> rho;
  /// Entries whose radicand 2(1 - rho) was negative and clamped to zero.
  std::size_t clamped = 0;

  double at(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
};

/// d = sqrt(2 (1 - rho)) entrywise.
DistanceMatrix distance_matrix(const CorrelationMatrix& c);

struct TreeEdge {
  std::size_t a = 0;  ///< a < b
  std::size_t b = 0;
  double distance = 0.0;
  double rho = 0.0;
};

struct SpanningTree {
  std::size_t node_count = 0;
  std::vector<std::string> labels;
  std::vector<TreeEdge> edges;  ///< sorted by (a, b)

  std::vector<std::vector<std::size_t>> adjacency() const;
  std::vector<std::size_t> degrees() const;
  double total_weight() const;
};

/// Prim's algorithm on the complete graph. Equal weights are ordered by
/// (min endpoint, max endpoint), which makes the tree unique.
SpanningTree minimum_spanning_tree(const DistanceMatrix& d);

struct SurvivalPoint {
  double degree = 0.0;
  double probability = 0.0;  ///< P(X >= degree)
};

struct DegreeDistribution {
  std::vector<std::size_t> degrees;   ///< per node
  std::vector<SurvivalPoint> points;  ///< one per distinct degree, ascending
};

DegreeDistribution degree_distribution(const SpanningTree& t);

struct PowerLawFit {
  double gamma = 0.0;           ///< magnitude of the log-log slope
  double standard_error = 0.0;  ///< of the slope estimate
  std::size_t support = 0;      ///< points used
};

/// Least squares of ln P(X >= k) on ln k over points with k >= 1, P > 0.
/// Empty when fewer than three such points exist.
std::optional<PowerLawFit> powerlaw_fit(const DegreeDistribution& dd);

enum class PathWeighting { kHops, kDistance };

/// Mean over unordered node pairs of the tree path length.
double mean_path_length(const SpanningTree& t, PathWeighting weighting = PathWeighting::kHops);

struct Partition {
  std::vector<std::string> labels;
  std::vector<std::size_t> community;  ///< per node, ids 0..count-1
  std::size_t community_count = 0;
  double modularity = 0.0;
  /// Modularity after each aggregation level; nondecreasing.
  std::vector<double> history;
  /// Set when no positive weight exists; every node is then its own community.
  bool all_zero_weights = false;
};

/// Newman modularity of `community` on a dense symmetric weight matrix.
double modularity(std::span<const double> weights, std::size_t n,
                  std::span<const std::size_t> community, double resolution = 1.0);

/// Louvain on a dense symmetric nonnegative weight matrix (diagonal ignored).
/// Nodes are swept in index order; `seed` breaks exact gain ties.
Partition louvain_weights(std::span<const double> weights, std::size_t n,
                          double resolution = 1.0, std::uint64_t seed = 0);

/// Louvain on the complete graph with weights max(rho, 0).
Partition louvain(const CorrelationMatrix& c, double resolution = 1.0, std::uint64_t seed = 0);

struct CoMembership {
  std::vector<std::string> labels;
  std::vector<std::vector<bool>> rows;  ///< per partition, per node
};

/// rows[w][j] is true iff node j shares the anchor's community in partition w.
CoMembership cluster_track(std::span<const Partition> partitions, const std::string& anchor);

}  // namespace qdcca
