#include "qdcca/dfa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "dfa_detail.hpp"
#include "qdcca/error.hpp"

namespace qdcca {

namespace {

// Orthonormal basis (column-major, s x (m+1)) of polynomials of degree <= m
// sampled on a centred, scaled abscissa. Built with modified Gram-Schmidt
// and one re-orthogonalisation pass.
std::vector<double> polynomial_basis(std::size_t s, int m) {
  const std::size_t cols = static_cast<std::size_t>(m) + 1;
  std::vector<double> basis(s * cols);
  const double centre = 0.5 * static_cast<double>(s + 1);
  for (std::size_t k = 0; k < cols; ++k) {
    double* col = basis.data() + k * s;
    for (std::size_t i = 0; i < s; ++i) {
      const double u = (static_cast<double>(i + 1) - centre) / static_cast<double>(s);
      col[i] = std::pow(u, static_cast<double>(k));
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        const double* prev = basis.data() + j * s;
        double c = 0.0;
        for (std::size_t i = 0; i < s; ++i) c += prev[i] * col[i];
        for (std::size_t i = 0; i < s; ++i) col[i] -= c * prev[i];
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < s; ++i) norm += col[i] * col[i];
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < s; ++i) col[i] /= norm;
  }
  return basis;
}

bool is_constant(std::span<const double> v) {
  for (double x : v)
    if (x != v.front()) return false;
  return true;
}

}  // namespace

void DetrendConfig::validate() const {
  if (!(q > 0.0) || !std::isfinite(q))
    throw Error(ErrorKind::kInvalidConfig,
                "q must be a finite positive number, got " + std::to_string(q));
  if (scale == 0) throw Error(ErrorKind::kInvalidConfig, "scale must be positive");
  if (poly_order < 0)
    throw Error(ErrorKind::kInvalidConfig, "polynomial order must be nonnegative");
  if (scale < static_cast<std::size_t>(poly_order) + 2)
    throw Error(ErrorKind::kDegenerateFit,
                "scale " + std::to_string(scale) + " too small for polynomial order " +
                    std::to_string(poly_order) + " (need s >= m + 2)");
}

std::size_t box_start(std::size_t length, std::size_t scale, std::size_t v) {
  const std::size_t per_side = length / scale;
  if (v < per_side) return v * scale;
  return length - (v - per_side + 1) * scale;
}

BoxResiduals compute_box_residuals(std::span<const double> x,
                                   const DetrendConfig& cfg) {
  cfg.validate();
  const std::size_t s = cfg.scale;
  if (x.size() < 2 * s)
    throw Error(ErrorKind::kScaleTooLarge,
                "series of length " + std::to_string(x.size()) +
                    " is shorter than two boxes of scale " + std::to_string(s));
  for (double v : x)
    if (!std::isfinite(v))
      throw Error(ErrorKind::kNonFinite, "series contains a non-finite value");

  const std::vector<double> basis = polynomial_basis(s, cfg.poly_order);
  const std::size_t cols = static_cast<std::size_t>(cfg.poly_order) + 1;

  BoxResiduals out;
  out.scale = s;
  out.box_count = 2 * (x.size() / s);
  out.values.resize(out.box_count * s);

  for (std::size_t v = 0; v < out.box_count; ++v) {
    const auto samples = x.subspan(box_start(x.size(), s, v), s);
    double* r = out.values.data() + v * s;
    // A constant box has a linear profile, which any m >= 1 absorbs exactly.
    if (cfg.poly_order >= 1 && is_constant(samples)) {
      std::fill(r, r + s, 0.0);
      continue;
    }
    double profile = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      profile += samples[i];
      r[i] = profile;
    }
    for (std::size_t k = 0; k < cols; ++k) {
      const double* col = basis.data() + k * s;
      double c = 0.0;
      for (std::size_t i = 0; i < s; ++i) c += col[i] * r[i];
      for (std::size_t i = 0; i < s; ++i) r[i] -= c * col[i];
    }
  }
  return out;
}

BoxMoments local_moments(const BoxResiduals& bx, const BoxResiduals& by) {
  if (bx.box_count != by.box_count || bx.scale != by.scale)
    throw Error(ErrorKind::kBoxCountMismatch,
                "box layouts differ: " + std::to_string(bx.box_count) + "x" +
                    std::to_string(bx.scale) + " vs " + std::to_string(by.box_count) +
                    "x" + std::to_string(by.scale));
  const std::size_t s = bx.scale;
  BoxMoments m;
  m.xx.resize(bx.box_count);
  m.yy.resize(bx.box_count);
  m.xy.resize(bx.box_count);
  std::vector<double> cx(s), cy(s);
  for (std::size_t v = 0; v < bx.box_count; ++v) {
    detail::center_box(bx.box(v), cx);
    detail::center_box(by.box(v), cy);
    m.xx[v] = detail::dot(cx, cx);
    m.yy[v] = detail::dot(cy, cy);
    m.xy[v] = detail::dot(cx, cy);
  }
  return m;
}

FluctuationSet fluctuation_functions(const BoxMoments& moments, double q,
                                     std::size_t scale) {
  if (!(q > 0.0)) throw Error(ErrorKind::kInvalidConfig, "q must be positive");
  const std::size_t n = moments.xx.size();
  if (n == 0 || moments.yy.size() != n || moments.xy.size() != n)
    throw Error(ErrorKind::kBoxCountMismatch, "moment vectors empty or of unequal size");
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    sxx += detail::signed_power(moments.xx[v], q);
    syy += detail::signed_power(moments.yy[v], q);
    sxy += detail::signed_power(moments.xy[v], q);
  }
  const double boxes = static_cast<double>(n);
  return {sxx / boxes, syy / boxes, sxy / boxes, q, scale};
}

double rho_from_fluctuations(const FluctuationSet& f) {
  if (!(f.xx > 0.0) || !(f.yy > 0.0))
    throw Error(ErrorKind::kZeroVariance,
                "undefined correlation: a series has zero detrended variance");
  return f.xy / std::sqrt(f.xx * f.yy);
}

double rho_q(std::span<const double> x, std::span<const double> y,
             const DetrendConfig& cfg) {
  if (x.size() != y.size())
    throw Error(ErrorKind::kLengthMismatch,
                "series lengths differ: " + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()));
  const BoxResiduals bx = compute_box_residuals(x, cfg);
  const BoxResiduals by = compute_box_residuals(y, cfg);
  return rho_from_fluctuations(
      fluctuation_functions(local_moments(bx, by), cfg.q, cfg.scale));
}

double rho_q_lagged(std::span<const double> x, std::span<const double> y,
                    const DetrendConfig& cfg, long tau) {
  if (x.size() != y.size())
    throw Error(ErrorKind::kLengthMismatch, "series lengths differ");
  const std::size_t shift = static_cast<std::size_t>(std::labs(tau));
  if (shift >= x.size() || x.size() - shift < 2 * cfg.scale)
    throw Error(ErrorKind::kOverlapTooShort,
                "lag " + std::to_string(tau) + " leaves fewer than two boxes of scale " +
                    std::to_string(cfg.scale));
  const std::size_t overlap = x.size() - shift;
  if (tau >= 0) return rho_q(x.first(overlap), y.subspan(shift, overlap), cfg);
  return rho_q(x.subspan(shift, overlap), y.first(overlap), cfg);
}

PreparedSeries prepare_series(std::span<const double> x, const DetrendConfig& cfg) {
  BoxResiduals r = compute_box_residuals(x, cfg);
  PreparedSeries p;
  p.scale = r.scale;
  p.box_count = r.box_count;
  p.centered.resize(r.values.size());
  p.box_variance.resize(r.box_count);
  for (std::size_t v = 0; v < r.box_count; ++v) {
    std::span<double> c(p.centered.data() + v * r.scale, r.scale);
    detail::center_box(r.box(v), c);
    p.box_variance[v] = detail::dot(c, c);
  }
  return p;
}

double fluctuation_self(const PreparedSeries& a, double q) {
  double sum = 0.0;
  for (double f2 : a.box_variance) sum += detail::signed_power(f2, q);
  return sum / static_cast<double>(a.box_count);
}

void box_covariances(const PreparedSeries& a, const PreparedSeries& b,
                     std::span<double> out) {
  if (a.box_count != b.box_count || a.scale != b.scale || out.size() != a.box_count)
    throw Error(ErrorKind::kBoxCountMismatch, "prepared series layouts differ");
  const std::size_t s = a.scale;
  for (std::size_t v = 0; v < a.box_count; ++v) {
    out[v] = detail::dot({a.centered.data() + v * s, s}, {b.centered.data() + v * s, s});
  }
}

double fluctuation_cross(std::span<const double> covariances, double q) {
  double sum = 0.0;
  for (double c : covariances) sum += detail::signed_power(c, q);
  return sum / static_cast<double>(covariances.size());
}

}  // namespace qdcca
