#pragma once

// Arithmetic shared by the pair path (rho_q) and the cached-series path
// (PreparedSeries). Both must perform identical floating-point operations
// in identical order so that matrix entries equal rho_q bit for bit.

#include <cmath>
#include <cstddef>
#include <span>

namespace qdcca::detail {

inline double signed_power(double v, double q) {
  if (q == 2.0) return v;
  const double a = std::fabs(v);
  const double r = (q == 4.0) ? a * a : std::pow(a, 0.5 * q);
  return v < 0.0 ? -r : r;
}

inline void center_box(std::span<const double> in, std::span<double> out) {
  double sum = 0.0;
  for (double v : in) sum += v;
  const double mean = sum / static_cast<double>(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] - mean;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace qdcca::detail
