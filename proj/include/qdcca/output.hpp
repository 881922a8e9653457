#pragma once

// CSV families and the run manifest written by a pipeline run.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "qdcca/config.hpp"
#include "qdcca/pipeline.hpp"

namespace qdcca {

/// Shortest decimal that round-trips; "nan" for NaN.
std::string format_number(double v);

struct OutputFile {
  std::string name;
  std::string family;  ///< spectra, topology, edges, clusters, lagged, periods
  std::vector<std::string> columns;
  std::size_t rows = 0;
  std::string hash;  ///< FNV-1a of the file bytes
};

struct RunSummary {
  std::vector<OutputFile> files;
  std::string config_hash;
  std::string output_hash;  ///< FNV-1a over every file hash in name order
  std::string manifest;     ///< manifest.json contents
};

/// Renders every CSV selected by `stages` plus manifest.json into `dir`.
RunSummary write_outputs(const AnalysisResult& result, const PreparedData& data,
                         const AnalysisConfig& cfg, unsigned stages,
                         const std::filesystem::path& dir);

/// Column layout of each family (edges and periods are fixed; the others
/// depend on config and tickers).
std::vector<std::string> family_columns(const std::string& family, const AnalysisConfig& cfg,
                                        const std::vector<std::string>& tickers);

}  // namespace qdcca
