#include "qdcca/synth.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <random>

#include "qdcca/error.hpp"

namespace qdcca {

Generator parse_generator(std::string_view name) {
  if (name == "gaussian") return Generator::kGaussian;
  if (name == "correlated") return Generator::kCorrelated;
  if (name == "ar1") return Generator::kAr1;
  if (name == "factor") return Generator::kFactor;
  if (name == "blocks") return Generator::kBlocks;
  if (name == "epps") return Generator::kEpps;
  throw Error(ErrorKind::kInvalidConfig, "unknown generator '" + std::string(name) + "'");
}

std::string_view to_string(Generator g) {
  switch (g) {
    case Generator::kGaussian: return "gaussian";
    case Generator::kCorrelated: return "correlated";
    case Generator::kAr1: return "ar1";
    case Generator::kFactor: return "factor";
    case Generator::kBlocks: return "blocks";
    case Generator::kEpps: return "epps";
  }
  return "gaussian";
}

std::vector<double> cholesky(const std::vector<double>& a, std::size_t n) {
  if (a.size() != n * n) throw Error(ErrorKind::kDimensionMismatch, "target matrix size mismatch");
  const auto idx = static_cast<Eigen::Index>(n);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      a.data(), idx, idx);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::kNotPositiveDefinite, "target correlation matrix is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      out[i * n + j] = l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

namespace {

std::vector<double> block_target(const GeneratorSpec& spec, std::size_t n) {
  std::vector<std::size_t> block_of;
  for (std::size_t b = 0; b < spec.blocks.size(); ++b)
    for (std::size_t k = 0; k < spec.blocks[b]; ++k) block_of.push_back(b);
  if (block_of.size() != n)
    throw Error(ErrorKind::kInvalidConfig, "block sizes do not add up to the asset count");
  std::vector<double> t(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      t[i * n + j] = i == j ? 1.0 : (block_of[i] == block_of[j] ? spec.within : spec.across);
  return t;
}

}  // namespace

ReturnMatrix synth_returns(const GeneratorSpec& spec, std::uint64_t seed) {
  const std::size_t n = spec.kind == Generator::kBlocks && !spec.blocks.empty()
                            ? [&] {
                                std::size_t total = 0;
                                for (auto b : spec.blocks) total += b;
                                return total;
                              }()
                            : spec.assets;
  const std::size_t len = spec.length;
  if (n == 0 || len == 0) throw Error(ErrorKind::kInvalidConfig, "generator needs assets and length");

  ReturnMatrix r;
  if (spec.tickers.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "A%02zu", i + 1);
      r.tickers.emplace_back(name);
    }
  } else {
    if (spec.tickers.size() != n) throw Error(ErrorKind::kInvalidConfig, "ticker count mismatch");
    r.tickers = spec.tickers;
  }
  r.timestamps.resize(len);
  for (std::size_t t = 0; t < len; ++t) r.timestamps[t] = spec.start + static_cast<std::int64_t>(t) + 1;
  r.values.assign(n * len, 0.0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto at = [&](std::size_t i, std::size_t t) -> double& { return r.values[i * len + t]; };

  switch (spec.kind) {
    case Generator::kGaussian:
      for (std::size_t t = 0; t < len; ++t)
        for (std::size_t i = 0; i < n; ++i) at(i, t) = normal(rng);
      break;

    case Generator::kCorrelated:
    case Generator::kBlocks: {
      std::vector<double> target = spec.target;
      if (spec.kind == Generator::kBlocks) {
        target = block_target(spec, n);
      } else if (target.empty()) {
        target.assign(n * n, spec.rho);
        for (std::size_t i = 0; i < n; ++i) target[i * n + i] = 1.0;
      }
      const std::vector<double> l = cholesky(target, n);
      std::vector<double> e(n);
      for (std::size_t t = 0; t < len; ++t) {
        for (auto& v : e) v = normal(rng);
        for (std::size_t i = 0; i < n; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j <= i; ++j) s += l[i * n + j] * e[j];
          at(i, t) = s;
        }
      }
      break;
    }

    case Generator::kAr1: {
      if (!(std::fabs(spec.phi) < 1.0)) throw Error(ErrorKind::kInvalidConfig, "AR(1) needs |phi| < 1");
      const double sd0 = 1.0 / std::sqrt(1.0 - spec.phi * spec.phi);
      for (std::size_t i = 0; i < n; ++i) at(i, 0) = sd0 * normal(rng);
      for (std::size_t t = 1; t < len; ++t)
        for (std::size_t i = 0; i < n; ++i) at(i, t) = spec.phi * at(i, t - 1) + normal(rng);
      break;
    }

    case Generator::kFactor: {
      std::vector<double> beta = spec.loadings;
      if (beta.empty()) {
        for (std::size_t i = 0; i < n; ++i)
          beta.push_back(n == 1 ? 0.65 : 0.4 + 0.5 * static_cast<double>(i) / static_cast<double>(n - 1));
      }
      if (beta.size() != n) throw Error(ErrorKind::kInvalidConfig, "loading count mismatch");
      for (std::size_t t = 0; t < len; ++t) {
        const double f = normal(rng);
        for (std::size_t i = 0; i < n; ++i) at(i, t) = beta[i] * f + normal(rng);
      }
      break;
    }

    case Generator::kEpps: {
      // Asset i absorbs each factor shock over time through a geometric
      // kernel whose mean delay grows with i; the kernel sums to one, so at
      // long scales every asset carries the full factor.
      std::vector<double> decay(n), common(n, 0.0), noise(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double delay =
            n == 1 ? 1.0 : 1.0 + (spec.max_delay - 1.0) * static_cast<double>(i) / static_cast<double>(n - 1);
        decay[i] = std::exp(-1.0 / delay);
      }
      for (std::size_t i = 0; i < n; ++i) noise[i] = spec.microstructure * normal(rng);
      for (std::size_t t = 0; t < len; ++t) {
        const double f = normal(rng);
        for (std::size_t i = 0; i < n; ++i) {
          common[i] = decay[i] * common[i] + (1.0 - decay[i]) * f;
          const double next_noise = spec.microstructure * normal(rng);
          at(i, t) = common[i] + spec.idiosyncratic * normal(rng) + next_noise - noise[i];
          noise[i] = next_noise;
        }
      }
      break;
    }
  }
  return r;
}

std::vector<QuoteSeries> synth_quotes(const GeneratorSpec& spec, std::uint64_t seed) {
  const ReturnMatrix r = synth_returns(spec, seed);
  std::vector<QuoteSeries> out;
  for (std::size_t i = 0; i < r.rows(); ++i) {
    QuoteSeries q;
    q.ticker = r.tickers[i];
    q.timestamps.reserve(r.cols() + 1);
    q.prices.reserve(r.cols() + 1);
    q.timestamps.push_back(spec.start);
    double log_price = std::log(100.0);
    q.prices.push_back(100.0);
    const auto row = r.row(i);
    for (std::size_t t = 0; t < r.cols(); ++t) {
      log_price += spec.volatility * row[t];
      q.timestamps.push_back(r.timestamps[t]);
      q.prices.push_back(std::exp(log_price));
    }
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace qdcca
