#pragma once

// Reproducible synthetic return and price generators used as test oracles
// and for smoke runs of the pipeline.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qdcca/quotes.hpp"
#include "qdcca/returns.hpp"

namespace qdcca {

enum class Generator {
  kGaussian,    ///< i.i.d. standard normal rows
  kCorrelated,  ///< Gaussian with a target correlation matrix (Cholesky)
  kAr1,         ///< independent AR(1) rows
  kFactor,      ///< r_i = beta_i f + e_i
  kBlocks,      ///< planted block correlation structure
  kEpps,        ///< common factor seen through asset-specific delays plus microstructure noise
};

Generator parse_generator(std::string_view name);
std::string_view to_string(Generator g);

struct GeneratorSpec {
  Generator kind = Generator::kGaussian;
  std::size_t assets = 2;
  std::size_t length = 1000;
  /// kCorrelated: equicorrelation used when `target` is empty.
  double rho = 0.7;
  /// kCorrelated: optional N x N target correlation.
  std::vector<double> target;
  /// kAr1
  double phi = 0.9;
  /// kFactor: per-asset loadings; empty means evenly spaced in [0.4, 0.9].
  std::vector<double> loadings;
  /// kBlocks
  std::vector<std::size_t> blocks;
  double within = 0.8;
  double across = 0.0;
  /// kEpps: response delays are spread evenly over [1, max_delay] minutes.
  double max_delay = 30.0;
  double idiosyncratic = 1.0;   ///< kEpps: idiosyncratic return sd
  double microstructure = 1.0;  ///< kEpps: sd of i.i.d. price noise
  /// Per-minute log-return sd when converting to prices.
  double volatility = 1e-3;
  /// First quote, epoch minutes (2020-01-01T00:00Z).
  std::int64_t start = 26297280;
  std::vector<std::string> tickers;  ///< defaults to A01, A02, ...
};

ReturnMatrix synth_returns(const GeneratorSpec& spec, std::uint64_t seed);

/// Prices p(0) = 100, p(t+1) = p(t) exp(volatility * r(t)), one quote per minute.
std::vector<QuoteSeries> synth_quotes(const GeneratorSpec& spec, std::uint64_t seed);

/// Lower Cholesky factor of a row-major SPD matrix; throws kNotPositiveDefinite.
std::vector<double> cholesky(const std::vector<double>& a, std::size_t n);

}  // namespace qdcca
