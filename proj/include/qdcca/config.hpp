#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qdcca {

/// Every run parameter. Config-file keys and CLI flags share the names
/// given in the comments; the file groups them into sections:
///
///   data:    input, base, calendar, max-missing, peg-tolerance
///   scan:    q, s, poly-order, global-normalization
///   window:  window, step
///   network: resolution, anchors
///   lag:     lags
///   filter:  residual, threshold
///   run:     seed, threads, verbose, out
struct AnalysisConfig {
  std::string input;                       // input
  std::string base = "USDT";               // base
  std::string calendar = "continuous";     // calendar: continuous | intersect
  double max_missing = 0.01;               // max-missing
  double peg_tolerance = 0.02;             // peg-tolerance
  std::vector<double> q{1.0, 4.0};         // q
  std::vector<std::size_t> s{10, 60, 180, 360};  // s
  int poly_order = 2;                      // poly-order
  bool global_normalization = false;       // global-normalization
  std::size_t window = 10080;              // window
  std::size_t step = 1440;                 // step
  double resolution = 1.0;                 // resolution
  std::vector<std::string> anchors{"BTC", "ETH"};  // anchors
  std::vector<long> lags{-1, 0, 1};        // lags
  bool residual = false;                   // residual
  double threshold = 0.25;                 // threshold
  std::uint64_t seed = 0;                  // seed
  int threads = 0;                         // threads
  bool verbose = false;                    // verbose
  std::string out = "qdcca-out";           // out

  /// Throws kInvalidConfig with the offending key.
  void validate() const;
};

/// Overlays the keys present in a JSON config file onto `cfg`.
void apply_config_file(const std::filesystem::path& path, AnalysisConfig& cfg);
void apply_config_text(const std::string& text, AnalysisConfig& cfg);

/// Canonical JSON of the parameters that determine results (out, threads
/// excluded), with sorted keys.
std::string canonical_config(const AnalysisConfig& cfg);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);

/// Every config key as "section.key", for help text.
std::vector<std::string> config_keys();

}  // namespace qdcca
