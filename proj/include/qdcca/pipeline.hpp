#pragma once

// Rolling-window orchestration: data preparation, the per-window (q, s)
// sweep and the records it produces.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdcca/config.hpp"
#include "qdcca/netgraph.hpp"
#include "qdcca/quotes.hpp"
#include "qdcca/returns.hpp"
#include "qdcca/spectra.hpp"

namespace qdcca {

struct WindowPlan {
  std::size_t width = 10080;
  std::size_t step = 1440;
};

struct Window {
  std::size_t index = 0;
  std::size_t begin = 0;  ///< first sample
  std::size_t width = 0;
  std::int64_t start_time = 0;  ///< epoch minutes of the first sample, when known
  std::int64_t end_time = 0;    ///< epoch minutes of the last sample, when known

  std::size_t end() const { return begin + width; }
};

/// Offsets 0, step, 2 step, ... while offset + width <= T. Throws
/// kWindowTooWide when T < width.
std::vector<Window> rolling_windows(std::size_t length, const WindowPlan& plan);
std::vector<Window> rolling_windows(std::span<const std::int64_t> timestamps,
                                    const WindowPlan& plan);

struct TimedValue {
  std::int64_t time = 0;
  double value = 0.0;
};

struct Period {
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::size_t first = 0;  ///< index of the first point in the run
  std::size_t last = 0;
};

/// Maximal runs of consecutive points with value > threshold. NaN counts
/// as below. Throws kUnsortedTimestamps unless times strictly increase.
std::vector<Period> threshold_periods(std::span<const TimedValue> series, double threshold);

/// Sub-pipelines; analyze runs all of them.
enum Stage : unsigned {
  kStageSpectra = 1u,
  kStageNetwork = 2u,  ///< distances, MST, topology, edge lists
  kStageClusters = 4u,
  kStageLagged = 8u,
  kStagePeriods = 16u,
  kStageAll = 31u,
};

struct Exclusion {
  std::string ticker;
  std::string reason;
};

/// Returns ready for windowing, plus what was dropped on the way.
struct PreparedData {
  ReturnMatrix returns;
  std::vector<Exclusion> excluded;
  std::vector<double> retention;  ///< per kept ticker
  std::string base_mode;          ///< "quote" or "rebased:<ticker>"
};

/// Stable-coin exclusion, optional re-basing by `cfg.base`, calendar
/// alignment, log returns, removal of constant rows and, with
/// global-normalization, full-sample standardisation.
PreparedData prepare_data(std::vector<QuoteSeries> quotes, const AnalysisConfig& cfg);

struct SpectralRow {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double entropy1 = 0.0;
  double entropy2 = 0.0;
  double vmax1 = 0.0;  ///< squared largest component of v1
  double vmax2 = 0.0;
  bool degenerate = false;
  std::size_t out_of_range = 0;
  double trace_error = 0.0;  ///< |sum lambda - N|
};

struct ResidualRow {
  double lambda1 = 0.0;
  double entropy1 = 0.0;
  double vmax1 = 0.0;
  bool degenerate = false;
  double max_abs_corr = 0.0;  ///< max_i |corr(residual_i, z1)|
  double trace_error = 0.0;
};

struct TopologyRow {
  std::size_t node_count = 0;
  std::size_t k_max = 0;
  std::string hub;
  double mean_path = 0.0;           ///< over unordered pairs
  double mean_path_weighted = 0.0;  ///< path length in distance units
  double tree_weight = 0.0;
  std::optional<PowerLawFit> fit;
  std::size_t clamped = 0;
};

/// Results for one (q, s) in one window.
struct ScanResult {
  double q = 0.0;
  std::size_t scale = 0;
  bool ok = false;
  std::string error;
  SpectralRow spectral;
  std::optional<ResidualRow> residual;
  TopologyRow topology;
  std::vector<TreeEdge> edges;
  std::optional<Partition> partition;
  /// Per present anchor: rho with every asset, window order of tickers.
  std::vector<std::vector<double>> anchor_rho;
  /// Per present anchor, per lag: mean rho over non-anchor assets.
  std::vector<std::vector<double>> lagged;
};

struct WindowRecord {
  Window window;
  bool skipped = false;
  std::string skip_reason;
  std::vector<ScanResult> scans;  ///< s-major, then q, in config order
};

struct SkipEntry {
  std::size_t window = 0;
  std::int64_t end_time = 0;
  double q = 0.0;        ///< 0 when the whole window was skipped
  std::size_t scale = 0;
  std::string reason;
};

struct AnalysisResult {
  std::vector<std::string> tickers;
  std::vector<std::string> anchors;  ///< configured anchors present in the data
  std::vector<WindowRecord> windows;
  std::vector<SkipEntry> skips;

  const ScanResult* scan(std::size_t window, double q, std::size_t scale) const;
};

/// The per-window sweep, parallel over windows. Records come back in
/// window order and do not depend on the thread count.
AnalysisResult run_analysis(const AnalysisConfig& cfg, const ReturnMatrix& returns,
                            unsigned stages = kStageAll);

}  // namespace qdcca
