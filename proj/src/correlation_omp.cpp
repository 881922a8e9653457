#include <cmath>
#include <exception>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qdcca/error.hpp"
#include "qdcca/spectra.hpp"

namespace qdcca {

namespace {

int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

}  // namespace

std::vector<CorrelationMatrix> correlation_matrices(const ReturnMatrix& returns,
                                                    std::size_t scale, int poly_order,
                                                    std::span<const double> qs,
                                                    int threads) {
  const std::size_t n = returns.rows();
  if (n < 2) throw Error(ErrorKind::kDimensionMismatch, "need at least two series");
  if (qs.empty()) throw Error(ErrorKind::kInvalidConfig, "no q values requested");
  for (double q : qs) DetrendConfig{scale, poly_order, q}.validate();

  const DetrendConfig base{scale, poly_order, qs.front()};
  const int nthreads = resolve_threads(threads);

  std::vector<PreparedSeries> prepared(n);
  std::vector<std::exception_ptr> failures(n);
  const long rows = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (long i = 0; i < rows; ++i) {
    try {
      prepared[i] = prepare_series(returns.row(i), base);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), returns.tickers[i] + ": " + e.what());
    }
  }

  const std::size_t nq = qs.size();
  std::vector<double> self(nq * n);
  for (std::size_t k = 0; k < nq; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double f = fluctuation_self(prepared[i], qs[k]);
      if (!(f > 0.0))
        throw Error(ErrorKind::kZeroVariance,
                    "undefined correlation: " + returns.tickers[i] +
                        " has zero detrended variance");
      self[k * n + i] = f;
    }
  }

  std::vector<CorrelationMatrix> out(nq);
  for (std::size_t k = 0; k < nq; ++k) {
    auto& c = out[k];
    c.dim = n;
    c.entries.assign(n * n, 0.0);
    c.labels = returns.tickers;
    c.q = qs[k];
    c.scale = scale;
    for (std::size_t i = 0; i < n; ++i) c.at(i, i) = 1.0;
  }

  // Pair index p enumerates the strict upper triangle row by row.
  std::vector<std::size_t> pair_row;
  pair_row.reserve(n * (n - 1) / 2);
  std::vector<std::size_t> pair_col;
  pair_col.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      pair_row.push_back(i);
      pair_col.push_back(j);
    }
  const long pairs = static_cast<long>(pair_row.size());
  const std::size_t boxes = prepared.front().box_count;

#pragma omp parallel num_threads(nthreads)
  {
    std::vector<double> cov(boxes);
#pragma omp for schedule(dynamic, 16)
    for (long p = 0; p < pairs; ++p) {
      const std::size_t i = pair_row[p];
      const std::size_t j = pair_col[p];
      box_covariances(prepared[i], prepared[j], cov);
      for (std::size_t k = 0; k < nq; ++k) {
        const double fxy = fluctuation_cross(cov, qs[k]);
        const double rho = fxy / std::sqrt(self[k * n + i] * self[k * n + j]);
        out[k].at(i, j) = rho;
        out[k].at(j, i) = rho;
      }
    }
  }

  for (auto& c : out)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::fabs(c.at(i, j)) > 1.0) ++c.out_of_range;
  return out;
}

CorrelationMatrix correlation_matrix(const ReturnMatrix& returns, const DetrendConfig& cfg,
                                     int threads) {
  const double q[] = {cfg.q};
  return std::move(correlation_matrices(returns, cfg.scale, cfg.poly_order, q, threads).front());
}

}  // namespace qdcca
