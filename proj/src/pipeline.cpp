#include "qdcca/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qdcca/dfa.hpp"
#include "qdcca/error.hpp"

namespace qdcca {

std::vector<Window> rolling_windows(std::size_t length, const WindowPlan& plan) {
  if (plan.width == 0 || plan.step == 0)
    throw Error(ErrorKind::kInvalidConfig, "window width and step must be positive");
  if (length < plan.width)
    throw Error(ErrorKind::kWindowTooWide, "window of " + std::to_string(plan.width) +
                                               " samples exceeds the " + std::to_string(length) +
                                               " available");
  std::vector<Window> out;
  for (std::size_t off = 0; off + plan.width <= length; off += plan.step) {
    Window w;
    w.index = out.size();
    w.begin = off;
    w.width = plan.width;
    out.push_back(w);
  }
  return out;
}

std::vector<Window> rolling_windows(std::span<const std::int64_t> timestamps,
                                    const WindowPlan& plan) {
  std::vector<Window> out = rolling_windows(timestamps.size(), plan);
  for (auto& w : out) {
    w.start_time = timestamps[w.begin];
    w.end_time = timestamps[w.end() - 1];
  }
  return out;
}

std::vector<Period> threshold_periods(std::span<const TimedValue> series, double threshold) {
  for (std::size_t i = 1; i < series.size(); ++i)
    if (series[i].time <= series[i - 1].time)
      throw Error(ErrorKind::kUnsortedTimestamps,
                  "threshold series not strictly increasing at point " + std::to_string(i));
  std::vector<Period> out;
  bool open = false;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const bool above = series[i].value > threshold;
    if (above && !open) {
      out.push_back({series[i].time, series[i].time, i, i});
      open = true;
    } else if (above) {
      out.back().end = series[i].time;
      out.back().last = i;
    } else {
      open = false;
    }
  }
  return out;
}

const ScanResult* AnalysisResult::scan(std::size_t window, double q, std::size_t scale) const {
  if (window >= windows.size()) return nullptr;
  for (const auto& s : windows[window].scans)
    if (s.q == q && s.scale == scale) return &s;
  return nullptr;
}

namespace {

bool pegged(const QuoteSeries& s, double tolerance) {
  for (double p : s.prices)
    if (std::fabs(std::log(p)) > tolerance) return false;
  return true;
}

ReturnMatrix keep_rows(const ReturnMatrix& r, const std::vector<std::size_t>& rows) {
  ReturnMatrix out;
  out.timestamps = r.timestamps;
  out.normalized = r.normalized;
  const std::size_t t = r.cols();
  for (std::size_t i : rows) {
    out.tickers.push_back(r.tickers[i]);
    out.values.insert(out.values.end(), r.values.begin() + i * t, r.values.begin() + (i + 1) * t);
    if (!r.filled.empty())
      out.filled.insert(out.filled.end(), r.filled.begin() + i * t, r.filled.begin() + (i + 1) * t);
  }
  return out;
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * fraction);
  return buf;
}

}  // namespace

PreparedData prepare_data(std::vector<QuoteSeries> quotes, const AnalysisConfig& cfg) {
  PreparedData out;
  const auto base_it = std::find_if(quotes.begin(), quotes.end(),
                                    [&](const QuoteSeries& q) { return q.ticker == cfg.base; });
  std::optional<QuoteSeries> base;
  if (base_it != quotes.end()) {
    base = *base_it;
    quotes.erase(base_it);
    out.excluded.push_back({cfg.base, "re-basing asset"});
    out.base_mode = "rebased:" + cfg.base;
  } else {
    out.base_mode = "quote";
  }

  std::vector<QuoteSeries> kept;
  for (auto& q : quotes) {
    if (q.size() == 0) {
      out.excluded.push_back({q.ticker, "no quotes"});
    } else if (pegged(q, cfg.peg_tolerance)) {
      out.excluded.push_back({q.ticker, "pegged to the quote currency"});
    } else {
      kept.push_back(base ? rebase_prices(q, *base) : std::move(q));
    }
  }
  if (kept.size() < 2)
    throw Error(ErrorKind::kDimensionMismatch,
                "fewer than two usable series after exclusions (" + std::to_string(kept.size()) + ")");

  const AlignedQuotes aligned =
      cfg.calendar == "intersect" ? align_series(kept) : align_continuous(kept);
  ReturnMatrix r = build_returns(aligned);

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < r.rows(); ++i) {
    const auto row = r.row(i);
    const bool constant =
        std::all_of(row.begin(), row.end(), [&](double v) { return v == row.front(); });
    if (constant) {
      out.excluded.push_back({r.tickers[i], "constant returns"});
    } else {
      rows.push_back(i);
      out.retention.push_back(aligned.retention[i]);
    }
  }
  if (rows.size() < 2)
    throw Error(ErrorKind::kDimensionMismatch, "fewer than two non-constant return series");
  out.returns = rows.size() == r.rows() ? std::move(r) : keep_rows(r, rows);

  if (cfg.global_normalization) {
    for (std::size_t i = 0; i < out.returns.rows(); ++i) {
      const auto z = normalize(out.returns.row(i));
      std::copy(z.begin(), z.end(), out.returns.row(i).begin());
    }
    out.returns.normalized = true;
  }
  return out;
}

namespace {

struct Context {
  const AnalysisConfig& cfg;
  unsigned stages;
  std::vector<std::size_t> anchors;     // row indices of present anchors
  std::vector<std::size_t> non_anchor;  // rows excluded from every anchor list
};

/// [q][anchor][lag] mean lagged rho over non-anchor rows.
std::vector<std::vector<std::vector<double>>> lagged_means(const Context& ctx,
                                                           const ReturnMatrix& w,
                                                           std::size_t scale) {
  const auto& cfg = ctx.cfg;
  const std::size_t nq = cfg.q.size();
  std::vector<std::vector<std::vector<double>>> out(
      nq, std::vector<std::vector<double>>(ctx.anchors.size(),
                                           std::vector<double>(cfg.lags.size(), 0.0)));
  if (ctx.anchors.empty() || ctx.non_anchor.empty()) return out;
  const DetrendConfig dc{scale, cfg.poly_order, cfg.q.front()};
  const std::size_t len = w.cols();

  for (std::size_t l = 0; l < cfg.lags.size(); ++l) {
    const long tau = cfg.lags[l];
    const std::size_t shift = static_cast<std::size_t>(std::labs(tau));
    if (shift >= len || len - shift < 2 * scale)
      throw Error(ErrorKind::kOverlapTooShort, "lag " + std::to_string(tau) +
                                                   " leaves fewer than two boxes");
    const std::size_t overlap = len - shift;
    // tau >= 0 pairs x(0..) with y(shift..); tau < 0 the reverse.
    auto lead = [&](std::size_t row) {
      return tau >= 0 ? w.row(row).first(overlap) : w.row(row).subspan(shift, overlap);
    };
    auto follow = [&](std::size_t row) {
      return tau >= 0 ? w.row(row).subspan(shift, overlap) : w.row(row).first(overlap);
    };
    std::vector<PreparedSeries> others;
    others.reserve(ctx.non_anchor.size());
    for (std::size_t j : ctx.non_anchor) others.push_back(prepare_series(follow(j), dc));
    std::vector<double> cov(others.front().box_count);

    for (std::size_t a = 0; a < ctx.anchors.size(); ++a) {
      const PreparedSeries pa = prepare_series(lead(ctx.anchors[a]), dc);
      std::vector<double> sums(nq, 0.0);
      for (std::size_t j = 0; j < others.size(); ++j) {
        box_covariances(pa, others[j], cov);
        for (std::size_t k = 0; k < nq; ++k) {
          const double fa = fluctuation_self(pa, cfg.q[k]);
          const double fx = fluctuation_self(others[j], cfg.q[k]);
          if (!(fa > 0.0) || !(fx > 0.0))
            throw Error(ErrorKind::kZeroVariance, "undefined lagged correlation for " +
                                                      w.tickers[ctx.non_anchor[j]]);
          sums[k] += fluctuation_cross(cov, cfg.q[k]) / std::sqrt(fa * fx);
        }
      }
      for (std::size_t k = 0; k < nq; ++k)
        out[k][a][l] = sums[k] / static_cast<double>(others.size());
    }
  }
  return out;
}

SpectralRow spectral_row(const SpectralSummary& e) {
  SpectralRow row;
  row.lambda1 = e.eigenvalues[0];
  row.lambda2 = e.dim > 1 ? e.eigenvalues[1] : 0.0;
  row.entropy1 = e.entropies[0];
  row.entropy2 = e.dim > 1 ? e.entropies[1] : 0.0;
  row.vmax1 = e.max_components[0];
  row.vmax2 = e.dim > 1 ? e.max_components[1] : 0.0;
  row.degenerate = e.degenerate;
  double trace = 0.0;
  for (double l : e.eigenvalues) trace += l;
  row.trace_error = std::fabs(trace - static_cast<double>(e.dim));
  return row;
}

void fill_scan(const Context& ctx, const ReturnMatrix& w, const CorrelationMatrix& c,
               ScanResult& sr) {
  const auto& cfg = ctx.cfg;
  if (ctx.stages & (kStageSpectra)) {
    const SpectralSummary e = eigendecompose(c);
    sr.spectral = spectral_row(e);
    sr.spectral.out_of_range = c.out_of_range;
    if (cfg.residual) {
      const std::vector<double> z = eigensignal(w, e.vector(0));
      const ResidualReturns rr = residual_returns(w, z);
      ResidualRow res;
      for (std::size_t i = 0; i < rr.residuals.rows(); ++i)
        res.max_abs_corr = std::max(res.max_abs_corr, std::fabs(pearson(rr.residuals.row(i), z)));
      const CorrelationMatrix cr =
          correlation_matrix(rr.residuals, DetrendConfig{c.scale, cfg.poly_order, c.q}, 1);
      const SpectralSummary er = eigendecompose(cr);
      const SpectralRow r = spectral_row(er);
      res.lambda1 = r.lambda1;
      res.entropy1 = r.entropy1;
      res.vmax1 = r.vmax1;
      res.degenerate = r.degenerate;
      res.trace_error = r.trace_error;
      sr.residual = res;
    }
  }
  if (ctx.stages & kStageNetwork) {
    const DistanceMatrix d = distance_matrix(c);
    const SpanningTree t = minimum_spanning_tree(d);
    const DegreeDistribution dd = degree_distribution(t);
    TopologyRow& top = sr.topology;
    top.node_count = t.node_count;
    const auto hub = std::max_element(dd.degrees.begin(), dd.degrees.end());
    top.k_max = *hub;
    top.hub = t.labels[static_cast<std::size_t>(hub - dd.degrees.begin())];
    top.mean_path = mean_path_length(t, PathWeighting::kHops);
    top.mean_path_weighted = mean_path_length(t, PathWeighting::kDistance);
    top.tree_weight = t.total_weight();
    top.fit = powerlaw_fit(dd);
    top.clamped = d.clamped;
    sr.edges = t.edges;
  }
  if (ctx.stages & kStageClusters) sr.partition = louvain(c, cfg.resolution, cfg.seed);
  if (ctx.stages & kStagePeriods) {
    for (std::size_t a : ctx.anchors) {
      std::vector<double> row(c.dim);
      for (std::size_t j = 0; j < c.dim; ++j) row[j] = c.at(a, j);
      sr.anchor_rho.push_back(std::move(row));
    }
  }
}

WindowRecord process_window(const Context& ctx, const ReturnMatrix& returns, const Window& win) {
  const auto& cfg = ctx.cfg;
  WindowRecord rec;
  rec.window = win;
  ReturnMatrix w = returns.slice(win.begin, win.width);

  if (!w.filled.empty()) {
    const double limit = cfg.max_missing * static_cast<double>(win.width);
    for (std::size_t i = 0; i < w.rows(); ++i) {
      std::size_t missing = 0;
      for (std::size_t t = 0; t < w.cols(); ++t) missing += w.filled[i * w.cols() + t];
      if (static_cast<double>(missing) > limit) {
        rec.skipped = true;
        rec.skip_reason = w.tickers[i] + ": " +
                          percent(static_cast<double>(missing) / static_cast<double>(win.width)) +
                          " of samples missing";
        return rec;
      }
    }
  }
  if (!cfg.global_normalization) {
    for (std::size_t i = 0; i < w.rows(); ++i) {
      try {
        const auto z = normalize(w.row(i));
        std::copy(z.begin(), z.end(), w.row(i).begin());
      } catch (const Error&) {
        rec.skipped = true;
        rec.skip_reason = w.tickers[i] + ": zero variance in window";
        return rec;
      }
    }
    w.normalized = true;
  }

  const bool need_matrix = ctx.stages & (kStageSpectra | kStageNetwork | kStageClusters | kStagePeriods);
  for (std::size_t scale : cfg.s) {
    std::vector<CorrelationMatrix> mats;
    std::vector<std::vector<std::vector<double>>> lagged;
    std::string failure;
    try {
      if (need_matrix) mats = correlation_matrices(w, scale, cfg.poly_order, cfg.q, 1);
      if (ctx.stages & kStageLagged) lagged = lagged_means(ctx, w, scale);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    for (std::size_t k = 0; k < cfg.q.size(); ++k) {
      ScanResult sr;
      sr.q = cfg.q[k];
      sr.scale = scale;
      if (!failure.empty()) {
        sr.error = failure;
      } else {
        try {
          if (need_matrix) {
            mats[k].window = static_cast<long>(win.index);
            fill_scan(ctx, w, mats[k], sr);
          }
          if (!lagged.empty()) sr.lagged = lagged[k];
          sr.ok = true;
        } catch (const std::exception& e) {
          sr = ScanResult{};
          sr.q = cfg.q[k];
          sr.scale = scale;
          sr.error = e.what();
        }
      }
      rec.scans.push_back(std::move(sr));
    }
  }
  return rec;
}

}  // namespace

AnalysisResult run_analysis(const AnalysisConfig& cfg, const ReturnMatrix& returns,
                            unsigned stages) {
  cfg.validate();
  if (returns.rows() < 2)
    throw Error(ErrorKind::kDimensionMismatch, "need at least two return series");
  if (returns.values.size() != returns.rows() * returns.cols())
    throw Error(ErrorKind::kDimensionMismatch, "return matrix shape does not match its labels");

  AnalysisResult result;
  result.tickers = returns.tickers;
  Context ctx{cfg, stages, {}, {}};
  for (const auto& a : cfg.anchors) {
    const std::size_t i = returns.find(a);
    if (i < returns.rows()) {
      ctx.anchors.push_back(i);
      result.anchors.push_back(a);
    }
  }
  for (std::size_t i = 0; i < returns.rows(); ++i)
    if (std::find(cfg.anchors.begin(), cfg.anchors.end(), returns.tickers[i]) == cfg.anchors.end())
      ctx.non_anchor.push_back(i);

  const std::vector<Window> windows =
      rolling_windows(returns.timestamps, WindowPlan{cfg.window, cfg.step});
  result.windows.resize(windows.size());
  std::vector<std::exception_ptr> failures(windows.size());

  int threads = 1;
#ifdef _OPENMP
  threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#endif
  const long count = static_cast<long>(windows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < count; ++i) {
    try {
      result.windows[i] = process_window(ctx, returns, windows[i]);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }

  for (std::size_t i = 0; i < windows.size(); ++i) {
    auto& rec = result.windows[i];
    if (failures[i]) {
      rec = WindowRecord{};
      rec.window = windows[i];
      rec.skipped = true;
      try {
        std::rethrow_exception(failures[i]);
      } catch (const std::exception& e) {
        rec.skip_reason = e.what();
      }
    }
    if (rec.skipped) {
      result.skips.push_back({i, rec.window.end_time, 0.0, 0, rec.skip_reason});
      continue;
    }
    for (const auto& sr : rec.scans)
      if (!sr.ok) result.skips.push_back({i, rec.window.end_time, sr.q, sr.scale, sr.error});
  }
  return result;
}

}  // namespace qdcca
