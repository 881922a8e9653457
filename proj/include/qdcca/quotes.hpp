#pragma once

// Price ingestion and the transforms that turn quotes into return matrices.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdcca/returns.hpp"

namespace qdcca {

struct QuoteSeries {
  std::string ticker;
  std::vector<std::int64_t> timestamps;  ///< epoch minutes, strictly increasing
  std::vector<double> prices;            ///< > 0

  std::size_t size() const { return prices.size(); }
};

/// Epoch minutes from epoch seconds (or milliseconds, when the value is
/// too large to be seconds) or from ISO-8601 "YYYY-MM-DD[T ]HH:MM[:SS][Z]".
std::int64_t parse_timestamp(std::string_view field);

/// "YYYY-MM-DDTHH:MMZ" for an epoch-minute timestamp.
std::string format_timestamp(std::int64_t epoch_minutes);

/// Reads one CSV per ticker (`timestamp,price`, ticker = file stem), a wide
/// CSV (`timestamp,<ticker>,...`, empty cells allowed), or a directory of
/// per-ticker files. Series come back sorted by ticker for directories and
/// in column order for wide files.
std::vector<QuoteSeries> load_quotes(const std::filesystem::path& path);

/// Parses CSV text; `name` is used as the ticker of a two-column file and
/// in error messages.
std::vector<QuoteSeries> parse_quotes(std::string_view text, const std::string& name);

/// ln p(t+1) - ln p(t); length T - 1.
std::vector<double> log_returns(const QuoteSeries& q);

/// Zero mean, unit variance (divisor T).
std::vector<double> normalize(std::span<const double> x);

/// alt / base on the intersection of their grids.
QuoteSeries rebase_prices(const QuoteSeries& alt, const QuoteSeries& base);

struct AlignedQuotes {
  std::vector<std::string> tickers;
  std::vector<std::int64_t> timestamps;
  std::vector<double> prices;  ///< N x T row-major
  /// N x T, 1 where a price was carried forward over a missing minute.
  std::vector<std::uint8_t> filled;
  std::vector<double> retention;  ///< fraction of each input series kept

  std::size_t rows() const { return tickers.size(); }
  std::size_t cols() const { return timestamps.size(); }
};

/// Restricts every series to the intersection of their timestamp sets.
AlignedQuotes align_series(std::span<const QuoteSeries> series);

/// Places every series on the full minute grid spanning the period all of
/// them cover, carrying the last price forward over missing minutes.
AlignedQuotes align_continuous(std::span<const QuoteSeries> series);

/// Log returns of every aligned row. A return is marked filled when its
/// closing quote was carried forward.
ReturnMatrix build_returns(const AlignedQuotes& aligned);

}  // namespace qdcca
