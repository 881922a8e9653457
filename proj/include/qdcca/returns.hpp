#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qdcca {

/// N aligned return series on a shared grid, stored row-major (one row per
/// asset). Timestamps are epoch minutes; return m is labelled by the later
/// of its two quotes.
struct ReturnMatrix {
  std::vector<std::string> tickers;
  std::vector<std::int64_t> timestamps;
  std::vector<double> values;
  /// Optional N x T mask, 1 where the return was synthesised for a missing
  /// quote. Empty means nothing was filled.
  std::vector<std::uint8_t> filled;
  bool normalized = false;

  std::size_t rows() const { return tickers.size(); }
  std::size_t cols() const { return timestamps.size(); }

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * cols(), cols()};
  }
  std::span<double> row(std::size_t i) { return {values.data() + i * cols(), cols()}; }

  /// Columns [begin, begin + width) of every row.
  ReturnMatrix slice(std::size_t begin, std::size_t width) const;

  /// Index of `ticker`, or rows() when absent.
  std::size_t find(const std::string& ticker) const;
};

}  // namespace qdcca
