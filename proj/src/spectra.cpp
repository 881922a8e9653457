#include "qdcca/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "qdcca/error.hpp"

namespace qdcca {

CorrelationMatrix correlation_matrix_serial(const ReturnMatrix& returns,
                                            const DetrendConfig& cfg) {
  const std::size_t n = returns.rows();
  if (n < 2) throw Error(ErrorKind::kDimensionMismatch, "need at least two series");
  CorrelationMatrix c;
  c.dim = n;
  c.entries.assign(n * n, 0.0);
  c.labels = returns.tickers;
  c.q = cfg.q;
  c.scale = cfg.scale;
  for (std::size_t i = 0; i < n; ++i) {
    c.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double rho = 0.0;
      try {
        rho = rho_q(returns.row(i), returns.row(j), cfg);
      } catch (const Error& e) {
        throw Error(e.kind(), returns.tickers[i] + "/" + returns.tickers[j] + ": " + e.what());
      }
      c.at(i, j) = rho;
      c.at(j, i) = rho;
      if (std::fabs(rho) > 1.0) ++c.out_of_range;
    }
  }
  return c;
}

SpectralSummary eigendecompose(const CorrelationMatrix& c) {
  const std::size_t n = c.dim;
  if (n == 0 || c.entries.size() != n * n)
    throw Error(ErrorKind::kDimensionMismatch, "correlation matrix has inconsistent size");
  double asymmetry = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(c.at(i, j)))
        throw Error(ErrorKind::kNonFinite, "correlation matrix has a non-finite entry");
      asymmetry = std::max(asymmetry, std::fabs(c.at(i, j) - c.at(j, i)));
    }
  if (asymmetry > 0.0)
    throw Error(ErrorKind::kDimensionMismatch, "correlation matrix is not symmetric");

  const auto idx = static_cast<Eigen::Index>(n);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      m(c.entries.data(), idx, idx);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigensolver did not converge (N=" << n << ", |C|_F=" << m.norm()
        << ", max|C|=" << m.cwiseAbs().maxCoeff() << ")";
    throw Error(ErrorKind::kEigenNonConvergence, msg.str());
  }

  SpectralSummary out;
  out.dim = n;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n * n);
  out.entropies.resize(n);
  out.max_components.resize(n);
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  for (std::size_t k = 0; k < n; ++k) {
    const auto src = static_cast<Eigen::Index>(n - 1 - k);  // ascending -> descending
    out.eigenvalues[k] = values(src);
    std::size_t arg = 0;
    for (std::size_t j = 1; j < n; ++j)
      if (std::fabs(vectors(static_cast<Eigen::Index>(j), src)) >
          std::fabs(vectors(static_cast<Eigen::Index>(arg), src)))
        arg = j;
    const double sign = vectors(static_cast<Eigen::Index>(arg), src) < 0.0 ? -1.0 : 1.0;
    double* col = out.eigenvectors.data() + k * n;
    for (std::size_t j = 0; j < n; ++j) col[j] = sign * vectors(static_cast<Eigen::Index>(j), src);
    out.max_components[k] = col[arg] * col[arg];
    out.entropies[k] = shannon_entropy(out.vector(k));
  }
  for (std::size_t k = 0; k + 1 < n; ++k)
    if (out.eigenvalues[k] - out.eigenvalues[k + 1] < 1e-8) out.degenerate = true;
  return out;
}

double shannon_entropy(std::span<const double> v) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (!(std::fabs(norm2 - 1.0) <= 1e-9))
    throw Error(ErrorKind::kNotNormalized,
                "entropy needs a unit vector, |v|^2 = " + std::to_string(norm2));
  double h = 0.0;
  for (double x : v) {
    const double p = x * x;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

std::vector<double> eigensignal(const ReturnMatrix& returns, std::span<const double> v1) {
  if (v1.size() != returns.rows())
    throw Error(ErrorKind::kDimensionMismatch,
                "eigenvector length " + std::to_string(v1.size()) + " does not match " +
                    std::to_string(returns.rows()) + " series");
  std::vector<double> z(returns.cols(), 0.0);
  for (std::size_t j = 0; j < returns.rows(); ++j) {
    const auto r = returns.row(j);
    for (std::size_t t = 0; t < z.size(); ++t) z[t] += v1[j] * r[t];
  }
  return z;
}

namespace {

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double centered_cross(std::span<const double> a, double ma, std::span<const double> b,
                      double mb) {
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) s += (a[t] - ma) * (b[t] - mb);
  return s;
}

}  // namespace

ResidualReturns residual_returns(const ReturnMatrix& returns, std::span<const double> z1) {
  if (z1.size() != returns.cols())
    throw Error(ErrorKind::kDimensionMismatch, "eigensignal length does not match returns");
  const double mz = mean(z1);
  const double szz = centered_cross(z1, mz, z1, mz);
  double zz = 0.0;
  for (double z : z1) zz += z * z;
  if (!(szz > 1e-28 * zz) || szz == 0.0)
    throw Error(ErrorKind::kConstantEigensignal, "eigensignal is constant over the window");

  ResidualReturns out;
  out.residuals = returns;
  out.residuals.normalized = false;
  out.alpha.resize(returns.rows());
  out.beta.resize(returns.rows());
  out.eigensignal.assign(z1.begin(), z1.end());

  for (std::size_t i = 0; i < returns.rows(); ++i) {
    const auto r = returns.row(i);
    auto res = out.residuals.row(i);
    const double mr = mean(r);
    double alpha = centered_cross(r, mr, z1, mz) / szz;
    double beta = mr - alpha * mz;
    for (std::size_t t = 0; t < r.size(); ++t) res[t] = r[t] - alpha * z1[t] - beta;
    // One refinement pass removes what rounding left of the fit.
    const double mres = mean(res);
    const double dalpha = centered_cross(res, mres, z1, mz) / szz;
    const double dbeta = mres - dalpha * mz;
    if (dalpha != 0.0 || dbeta != 0.0) {
      for (std::size_t t = 0; t < r.size(); ++t) res[t] -= dalpha * z1[t] + dbeta;
      alpha += dalpha;
      beta += dbeta;
    }
    out.alpha[i] = alpha;
    out.beta[i] = beta;
  }
  return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw Error(ErrorKind::kLengthMismatch, "pearson needs equal, nonempty inputs");
  const double ma = mean(a), mb = mean(b);
  const double sab = centered_cross(a, ma, b, mb);
  const double saa = centered_cross(a, ma, a, ma);
  const double sbb = centered_cross(b, mb, b, mb);
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace qdcca
