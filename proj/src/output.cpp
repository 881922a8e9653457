#include "qdcca/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <map>

#include "qdcca/error.hpp"
#include "qdcca/quotes.hpp"

namespace qdcca {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

std::string pad(std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::string tag(double q, std::size_t s) { return format_number(q) + "_" + std::to_string(s); }

struct Table {
  std::string name;
  std::string family;
  std::vector<std::string> columns;
  std::string body;
  std::size_t rows = 0;

  void add(const std::vector<std::string>& cells) {
    body += join(cells);
    ++rows;
  }
};

std::vector<std::string> window_cells(const Window& w) {
  return {std::to_string(w.index), format_timestamp(w.end_time)};
}

}  // namespace

std::vector<std::string> family_columns(const std::string& family, const AnalysisConfig& cfg,
                                        const std::vector<std::string>& tickers) {
  if (family == "spectra") {
    std::vector<std::string> c{"window", "window_end", "q", "s", "lambda1", "lambda2", "entropy1",
                               "entropy2", "v1_max", "v2_max", "degenerate", "out_of_range",
                               "trace_error"};
    if (cfg.residual)
      for (const char* k : {"res_lambda1", "res_entropy1", "res_v1_max", "res_degenerate",
                            "res_max_abs_corr"})
        c.emplace_back(k);
    return c;
  }
  if (family == "topology") {
    std::vector<std::string> c{"window", "window_end", "q", "s", "nodes", "k_max", "hub", "mean_path",
                               "gamma", "gamma_se", "fit_points", "tree_weight", "clamped"};
    if (cfg.verbose) {
      c.emplace_back("mean_path_ordered");
      c.emplace_back("mean_path_distance");
    }
    return c;
  }
  if (family == "edges") return {"source", "target", "distance", "rho"};
  if (family == "clusters") {
    std::vector<std::string> c{"q", "window", "window_end", "communities", "modularity",
                               "cluster_size"};
    c.insert(c.end(), tickers.begin(), tickers.end());
    return c;
  }
  if (family == "lagged") {
    std::vector<std::string> c{"window", "window_end"};
    for (long tau : cfg.lags) c.push_back("tau_" + std::to_string(tau));
    return c;
  }
  if (family == "periods")
    return {"anchor", "ticker", "start", "end", "first_window", "last_window", "windows",
            "mean_rho"};
  throw Error(ErrorKind::kInvalidConfig, "unknown output family " + family);
}

RunSummary write_outputs(const AnalysisResult& result, const PreparedData& data,
                         const AnalysisConfig& cfg, unsigned stages,
                         const std::filesystem::path& dir) {
  std::vector<Table> tables;
  const auto& tickers = result.tickers;
  const std::size_t digits = std::to_string(result.windows.empty() ? 0 : result.windows.size() - 1).size();
  auto new_table = [&](std::string name, const std::string& family) -> Table& {
    tables.push_back({std::move(name), family, family_columns(family, cfg, tickers), {}, 0});
    return tables.back();
  };

  for (std::size_t s : cfg.s) {
    for (double q : cfg.q) {
      if (stages & kStageSpectra) {
        Table& t = new_table("spectra_" + tag(q, s) + ".csv", "spectra");
        for (std::size_t w = 0; w < result.windows.size(); ++w) {
          const ScanResult* sr = result.scan(w, q, s);
          if (!sr || !sr->ok) continue;
          const auto& r = sr->spectral;
          auto cells = window_cells(result.windows[w].window);
          cells.push_back(format_number(q));
          cells.push_back(std::to_string(s));
          for (double v : {r.lambda1, r.lambda2, r.entropy1, r.entropy2, r.vmax1, r.vmax2})
            cells.push_back(format_number(v));
          cells.push_back(r.degenerate ? "1" : "0");
          cells.push_back(std::to_string(r.out_of_range));
          cells.push_back(format_number(r.trace_error));
          if (cfg.residual) {
            const auto& x = *sr->residual;
            for (double v : {x.lambda1, x.entropy1, x.vmax1}) cells.push_back(format_number(v));
            cells.push_back(x.degenerate ? "1" : "0");
            cells.push_back(format_number(x.max_abs_corr));
          }
          t.add(cells);
        }
      }
      if (stages & kStageNetwork) {
        Table& t = new_table("topology_" + tag(q, s) + ".csv", "topology");
        std::vector<Table> edges;
        for (std::size_t w = 0; w < result.windows.size(); ++w) {
          const ScanResult* sr = result.scan(w, q, s);
          if (!sr || !sr->ok) continue;
          const auto& r = sr->topology;
          auto cells = window_cells(result.windows[w].window);
          cells.push_back(format_number(q));
          cells.push_back(std::to_string(s));
          cells.push_back(std::to_string(r.node_count));
          cells.push_back(std::to_string(r.k_max));
          cells.push_back(r.hub);
          cells.push_back(format_number(r.mean_path));
          const double nan = std::numeric_limits<double>::quiet_NaN();
          cells.push_back(format_number(r.fit ? r.fit->gamma : nan));
          cells.push_back(format_number(r.fit ? r.fit->standard_error : nan));
          cells.push_back(std::to_string(r.fit ? r.fit->support : 0));
          cells.push_back(format_number(r.tree_weight));
          cells.push_back(std::to_string(r.clamped));
          if (cfg.verbose) {
            cells.push_back(format_number(r.mean_path / 2.0));
            cells.push_back(format_number(r.mean_path_weighted));
          }
          t.add(cells);
          Table e{"edges_" + tag(q, s) + "_" + pad(w, digits) + ".csv", "edges",
                  family_columns("edges", cfg, tickers), {}, 0};
          for (const auto& edge : sr->edges)
            e.add({tickers[edge.a], tickers[edge.b], format_number(edge.distance),
                   format_number(edge.rho)});
          edges.push_back(std::move(e));
        }
        for (auto& e : edges) tables.push_back(std::move(e));
      }
      if (stages & kStagePeriods) {
        Table& t = new_table("periods_" + tag(q, s) + ".csv", "periods");
        for (std::size_t a = 0; a < result.anchors.size(); ++a) {
          const std::size_t ai =
              static_cast<std::size_t>(std::find(tickers.begin(), tickers.end(), result.anchors[a]) -
                                       tickers.begin());
          for (std::size_t j = 0; j < tickers.size(); ++j) {
            if (j == ai) continue;
            std::vector<TimedValue> series;
            for (std::size_t w = 0; w < result.windows.size(); ++w) {
              const ScanResult* sr = result.scan(w, q, s);
              const double v = sr && sr->ok ? sr->anchor_rho[a][j]
                                             : std::numeric_limits<double>::quiet_NaN();
              series.push_back({result.windows[w].window.end_time, v});
            }
            for (const Period& p : threshold_periods(series, cfg.threshold)) {
              double sum = 0.0;
              for (std::size_t k = p.first; k <= p.last; ++k) sum += series[k].value;
              const std::size_t n = p.last - p.first + 1;
              t.add({result.anchors[a], tickers[j], format_timestamp(p.start),
                     format_timestamp(p.end), std::to_string(p.first), std::to_string(p.last),
                     std::to_string(n), format_number(sum / static_cast<double>(n))});
            }
          }
        }
      }
    }
    if (stages & kStageClusters) {
      for (const auto& anchor : result.anchors) {
        Table& t = new_table("clusters_" + anchor + "_" + std::to_string(s) + ".csv", "clusters");
        for (double q : cfg.q) {
          std::vector<Partition> parts;
          std::vector<std::size_t> index;
          for (std::size_t w = 0; w < result.windows.size(); ++w) {
            const ScanResult* sr = result.scan(w, q, s);
            if (!sr || !sr->ok || !sr->partition) continue;
            parts.push_back(*sr->partition);
            index.push_back(w);
          }
          if (parts.empty()) continue;
          const CoMembership cm = cluster_track(parts, anchor);
          for (std::size_t k = 0; k < parts.size(); ++k) {
            std::vector<std::string> cells{format_number(q)};
            const auto wc = window_cells(result.windows[index[k]].window);
            cells.insert(cells.end(), wc.begin(), wc.end());
            cells.push_back(std::to_string(parts[k].community_count));
            cells.push_back(format_number(parts[k].modularity));
            std::size_t size = 0;
            for (bool b : cm.rows[k]) size += b;
            cells.push_back(std::to_string(size));
            for (bool b : cm.rows[k]) cells.push_back(b ? "1" : "0");
            t.add(cells);
          }
        }
      }
    }
    if (stages & kStageLagged) {
      for (std::size_t a = 0; a < result.anchors.size(); ++a) {
        for (std::size_t k = 0; k < cfg.q.size(); ++k) {
          const double q = cfg.q[k];
          Table& t = new_table("lagged_" + result.anchors[a] + "_" + tag(q, s) + ".csv", "lagged");
          for (std::size_t w = 0; w < result.windows.size(); ++w) {
            const ScanResult* sr = result.scan(w, q, s);
            if (!sr || !sr->ok || sr->lagged.empty()) continue;
            auto cells = window_cells(result.windows[w].window);
            for (double v : sr->lagged[a]) cells.push_back(format_number(v));
            t.add(cells);
          }
        }
      }
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create output directory " + dir.string());

  RunSummary summary;
  std::map<std::string, std::string> hashes;
  for (const auto& t : tables) {
    const std::string text = join(t.columns) + t.body;
    std::ofstream out(dir / t.name, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + (dir / t.name).string());
    OutputFile f{t.name, t.family, t.columns, t.rows, fnv1a_hex(text)};
    hashes[t.name] = f.hash;
    summary.files.push_back(std::move(f));
  }
  std::string all;
  for (const auto& [name, h] : hashes) all += name + ":" + h + "\n";
  summary.output_hash = fnv1a_hex(all);

  const std::string canonical = canonical_config(cfg);
  summary.config_hash = fnv1a_hex(canonical);

  json m;
  m["tool"] = "qdcca";
  m["config"] = json::parse(canonical);
  m["config_hash"] = summary.config_hash;
  m["seed"] = cfg.seed;
  m["window_label"] = "end";
  m["normalization"] = cfg.global_normalization ? "global" : "per-window";
  m["prices"] = data.base_mode;
  m["tickers"] = tickers;
  m["anchors"] = result.anchors;
  json excluded = json::array();
  for (const auto& e : data.excluded) excluded.push_back({{"ticker", e.ticker}, {"reason", e.reason}});
  m["excluded"] = excluded;
  json retention = json::object();
  for (std::size_t i = 0; i < tickers.size() && i < data.retention.size(); ++i)
    retention[tickers[i]] = data.retention[i];
  m["retention"] = retention;
  m["samples"] = data.returns.cols();
  m["windows"] = result.windows.size();
  std::size_t degenerate = 0;
  for (const auto& w : result.windows)
    for (const auto& sr : w.scans) degenerate += sr.ok && sr.spectral.degenerate;
  m["degenerate_spectra"] = degenerate;
  json skips = json::array();
  for (const auto& s : result.skips) {
    json e{{"window", s.window}, {"window_end", format_timestamp(s.end_time)}, {"reason", s.reason}};
    if (s.scale) {
      e["q"] = s.q;
      e["s"] = s.scale;
    }
    skips.push_back(e);
  }
  m["skips"] = skips;
  json files = json::array();
  for (const auto& f : summary.files)
    files.push_back({{"name", f.name}, {"family", f.family}, {"columns", f.columns},
                     {"rows", f.rows}, {"fnv1a", f.hash}});
  m["files"] = files;
  m["output_hash"] = summary.output_hash;
  summary.manifest = m.dump(2) + "\n";
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << summary.manifest;
  if (!out) throw Error(ErrorKind::kIo, "cannot write manifest");
  return summary;
}

}  // namespace qdcca
