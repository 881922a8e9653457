#pragma once

// q-dependent detrended cross-correlation (rho_q) on pairs of series.
//
// A series of length T is cut into M = floor(T/s) boxes of length s taken
// from the front and another M boxes taken from the back, 2M boxes total.
// In each box the cumulative sum of the box's samples is detrended by an
// order-m least-squares polynomial. Box variances and covariances of the
// residuals are raised to q/2 (keeping the covariance sign) and averaged.

#include <cstddef>
#include <span>
#include <vector>

namespace qdcca {

struct DetrendConfig {
  std::size_t scale = 10;  ///< box length s in samples
  int poly_order = 2;      ///< detrending polynomial order m
  double q = 2.0;          ///< fluctuation order, q > 0

  /// Throws kInvalidConfig (q <= 0, s == 0) or kDegenerateFit (s < m + 2).
  void validate() const;
};

/// Detrended profile residuals, stored box-major: box v occupies
/// values[v * scale, (v + 1) * scale). Boxes [0, M) run forward from the
/// first sample, boxes [M, 2M) run backward from the last sample.
struct BoxResiduals {
  std::size_t scale = 0;
  std::size_t box_count = 0;
  std::vector<double> values;

  std::span<const double> box(std::size_t v) const {
    return {values.data() + v * scale, scale};
  }
};

/// Per-box f^2_XX, f^2_YY and f^2_XY.
struct BoxMoments {
  std::vector<double> xx;
  std::vector<double> yy;
  std::vector<double> xy;
};

struct FluctuationSet {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;  ///< signed
  double q = 2.0;
  std::size_t scale = 0;
};

/// Index of the first sample of box v for a series of length `length`.
std::size_t box_start(std::size_t length, std::size_t scale, std::size_t v);

BoxResiduals compute_box_residuals(std::span<const double> x,
                                   const DetrendConfig& cfg);

BoxMoments local_moments(const BoxResiduals& bx, const BoxResiduals& by);

FluctuationSet fluctuation_functions(const BoxMoments& moments, double q,
                                     std::size_t scale = 0);

/// F_XY / sqrt(F_XX F_YY). Throws kZeroVariance when either F vanishes.
double rho_from_fluctuations(const FluctuationSet& f);

/// rho_q(s) of two equal-length series. Not clamped for q != 2.
double rho_q(std::span<const double> x, std::span<const double> y,
             const DetrendConfig& cfg);

/// rho_q on the overlap of x shifted by `tau` samples against y.
/// tau > 0 lags x (x(t - tau) is paired with y(t)); tau < 0 advances it.
double rho_q_lagged(std::span<const double> x, std::span<const double> y,
                    const DetrendConfig& cfg, long tau);

/// Single-series half of the pair computation, cached so that an N-series
/// matrix detrends each series once instead of N - 1 times. Results from
/// this path are bit-identical to rho_q.
struct PreparedSeries {
  std::size_t scale = 0;
  std::size_t box_count = 0;
  std::vector<double> centered;      ///< residuals minus their box mean
  std::vector<double> box_variance;  ///< f^2 per box
};

PreparedSeries prepare_series(std::span<const double> x,
                              const DetrendConfig& cfg);

/// (1/2M) sum_v [f^2(v)]^{q/2}
double fluctuation_self(const PreparedSeries& a, double q);

/// Per-box covariances f^2_XY written to `out` (size box_count).
void box_covariances(const PreparedSeries& a, const PreparedSeries& b,
                     std::span<double> out);

/// (1/2M) sum_v sign(c_v) |c_v|^{q/2}
double fluctuation_cross(std::span<const double> covariances, double q);

}  // namespace qdcca
