#include "qdcca/returns.hpp"

#include <algorithm>

#include "qdcca/error.hpp"

namespace qdcca {

ReturnMatrix ReturnMatrix::slice(std::size_t begin, std::size_t width) const {
  if (begin + width > cols())
    throw Error(ErrorKind::kWindowTooWide, "slice exceeds the return grid");
  ReturnMatrix out;
  out.tickers = tickers;
  out.timestamps.assign(timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                        timestamps.begin() + static_cast<std::ptrdiff_t>(begin + width));
  out.values.resize(rows() * width);
  if (!filled.empty()) out.filled.resize(rows() * width);
  for (std::size_t i = 0; i < rows(); ++i) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(i * cols() + begin), width,
                out.values.begin() + static_cast<std::ptrdiff_t>(i * width));
    if (!filled.empty())
      std::copy_n(filled.begin() + static_cast<std::ptrdiff_t>(i * cols() + begin), width,
                  out.filled.begin() + static_cast<std::ptrdiff_t>(i * width));
  }
  out.normalized = false;
  return out;
}

std::size_t ReturnMatrix::find(const std::string& ticker) const {
  return static_cast<std::size_t>(
      std::find(tickers.begin(), tickers.end(), ticker) - tickers.begin());
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfig: return "invalid-config";
    case ErrorKind::kNonFinite: return "non-finite";
    case ErrorKind::kScaleTooLarge: return "scale-too-large";
    case ErrorKind::kDegenerateFit: return "degenerate-fit";
    case ErrorKind::kBoxCountMismatch: return "box-count-mismatch";
    case ErrorKind::kZeroVariance: return "zero-variance-series";
    case ErrorKind::kLengthMismatch: return "length-mismatch";
    case ErrorKind::kOverlapTooShort: return "overlap-too-short";
    case ErrorKind::kNotNormalized: return "non-normalized-input";
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kConstantEigensignal: return "constant-eigensignal";
    case ErrorKind::kEigenNonConvergence: return "eigensolver-non-convergence";
    case ErrorKind::kParse: return "parse-error";
    case ErrorKind::kNonPositivePrice: return "nonpositive-price";
    case ErrorKind::kUnsortedTimestamps: return "unsorted-timestamps";
    case ErrorKind::kEmptyIntersection: return "empty-intersection";
    case ErrorKind::kWindowTooWide: return "window-too-wide";
    case ErrorKind::kUnknownAnchor: return "unknown-anchor";
    case ErrorKind::kNotPositiveDefinite: return "not-positive-definite";
    case ErrorKind::kIo: return "io-error";
  }
  return "unknown";
}

}  // namespace qdcca
