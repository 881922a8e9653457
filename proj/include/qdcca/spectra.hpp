#pragma once

// Detrended correlation matrices and their eigen-structure.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qdcca/dfa.hpp"
#include "qdcca/returns.hpp"

namespace qdcca {

/// Symmetric N x N matrix of rho_q(s) with unit diagonal (row-major).
struct CorrelationMatrix {
  std::size_t dim = 0;
  std::vector<double> entries;
  std::vector<std::string> labels;
  double q = 2.0;
  std::size_t scale = 0;
  long window = -1;
  /// Off-diagonal pairs with |rho| > 1 (possible for q != 2).
  std::size_t out_of_range = 0;

  double at(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
  double& at(std::size_t i, std::size_t j) { return entries[i * dim + j]; }
};

/// C_q(s) over all N(N-1)/2 pairs, parallel over pairs. `threads` <= 0
/// leaves the OpenMP default. Entries are bit-identical to rho_q for every
/// thread count.
CorrelationMatrix correlation_matrix(const ReturnMatrix& returns,
                                     const DetrendConfig& cfg, int threads = 0);

/// One matrix per q, sharing the detrending and box covariances across q.
std::vector<CorrelationMatrix> correlation_matrices(const ReturnMatrix& returns,
                                                    std::size_t scale, int poly_order,
                                                    std::span<const double> qs,
                                                    int threads = 0);

/// Serial reference: calls rho_q independently for every pair.
CorrelationMatrix correlation_matrix_serial(const ReturnMatrix& returns,
                                            const DetrendConfig& cfg);

struct SpectralSummary {
  std::size_t dim = 0;
  std::vector<double> eigenvalues;   ///< descending
  std::vector<double> eigenvectors;  ///< column k (stride dim) pairs with eigenvalue k
  std::vector<double> entropies;
  std::vector<double> max_components;  ///< largest squared component per vector
  /// True when two consecutive eigenvalues are closer than 1e-8, in which
  /// case the affected eigenvectors (and their entropies) are not unique.
  bool degenerate = false;

  std::span<const double> vector(std::size_t k) const {
    return {eigenvectors.data() + k * dim, dim};
  }
};

/// Full symmetric eigendecomposition. Each eigenvector is oriented so its
/// largest-magnitude component is positive.
SpectralSummary eigendecompose(const CorrelationMatrix& c);

/// -sum v(j)^2 ln v(j)^2, with 0 ln 0 = 0. Requires a unit vector.
double shannon_entropy(std::span<const double> v);

/// z(t) = sum_j v(j) r_j(t)
std::vector<double> eigensignal(const ReturnMatrix& returns, std::span<const double> v1);

struct ResidualReturns {
  ReturnMatrix residuals;
  std::vector<double> alpha;  ///< slope on the eigensignal
  std::vector<double> beta;   ///< intercept
  std::vector<double> eigensignal;
};

/// Removes the least-squares fit alpha_i z + beta_i from every row.
ResidualReturns residual_returns(const ReturnMatrix& returns, std::span<const double> z1);

/// Pearson correlation; 0 when either input has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace qdcca
