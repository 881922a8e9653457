#include "qdcca/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qdcca/error.hpp"

namespace qdcca {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::kInvalidConfig, "config key '" + key + "': " + why);
}

template <typename T>
void read(const json& section, const char* key, T& out, const std::string& where) {
  if (!section.contains(key)) return;
  try {
    out = section.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(where + "." + key, e.what());
  }
}

const std::vector<std::pair<std::string, std::vector<std::string>>>& layout() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> keys = {
      {"data", {"input", "base", "calendar", "max-missing", "peg-tolerance"}},
      {"scan", {"q", "s", "poly-order", "global-normalization"}},
      {"window", {"window", "step"}},
      {"network", {"resolution", "anchors"}},
      {"lag", {"lags"}},
      {"filter", {"residual", "threshold"}},
      {"run", {"seed", "threads", "verbose", "out"}},
  };
  return keys;
}

}  // namespace

void AnalysisConfig::validate() const {
  if (q.empty()) bad("q", "at least one value required");
  for (double v : q)
    if (!(v > 0.0) || !std::isfinite(v)) bad("q", "values must be positive");
  if (s.empty()) bad("s", "at least one value required");
  if (poly_order < 0) bad("poly-order", "must be nonnegative");
  for (std::size_t v : s) {
    if (v < static_cast<std::size_t>(poly_order) + 2)
      bad("s", "scale " + std::to_string(v) + " must be at least poly-order + 2");
    if (2 * v > window) bad("s", "scale " + std::to_string(v) + " needs a window of at least 2s");
  }
  if (window < 2) bad("window", "must be at least 2");
  if (step == 0) bad("step", "must be positive");
  if (!(max_missing >= 0.0 && max_missing <= 1.0)) bad("max-missing", "must lie in [0, 1]");
  if (!(peg_tolerance >= 0.0)) bad("peg-tolerance", "must be nonnegative");
  if (calendar != "continuous" && calendar != "intersect")
    bad("calendar", "must be 'continuous' or 'intersect'");
  if (!(resolution > 0.0)) bad("resolution", "must be positive");
  for (long tau : lags) {
    for (std::size_t v : s)
      if (static_cast<std::size_t>(std::labs(tau)) + 2 * v > window)
        bad("lags", "lag " + std::to_string(tau) + " leaves fewer than two boxes at s=" +
                        std::to_string(v));
  }
  if (!std::isfinite(threshold)) bad("threshold", "must be finite");
  if (threads < 0) bad("threads", "must be nonnegative");
}

void apply_config_text(const std::string& text, AnalysisConfig& cfg) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorKind::kInvalidConfig, "config must be a JSON object");
  for (const auto& [name, section] : root.items()) {
    const auto it = std::find_if(layout().begin(), layout().end(),
                                 [&](const auto& entry) { return entry.first == name; });
    if (it == layout().end()) bad(name, "unknown section");
    if (!section.is_object()) bad(name, "section must be an object");
    for (const auto& [key, value] : section.items())
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        bad(name + "." + key, "unknown key");
  }
  auto sect = [&](const char* name) { return root.contains(name) ? root.at(name) : json::object(); };
  const json data = sect("data"), scan = sect("scan"), window = sect("window"),
             network = sect("network"), lag = sect("lag"), filter = sect("filter"), run = sect("run");
  read(data, "input", cfg.input, "data");
  read(data, "base", cfg.base, "data");
  read(data, "calendar", cfg.calendar, "data");
  read(data, "max-missing", cfg.max_missing, "data");
  read(data, "peg-tolerance", cfg.peg_tolerance, "data");
  read(scan, "q", cfg.q, "scan");
  read(scan, "s", cfg.s, "scan");
  read(scan, "poly-order", cfg.poly_order, "scan");
  read(scan, "global-normalization", cfg.global_normalization, "scan");
  read(window, "window", cfg.window, "window");
  read(window, "step", cfg.step, "window");
  read(network, "resolution", cfg.resolution, "network");
  read(network, "anchors", cfg.anchors, "network");
  read(lag, "lags", cfg.lags, "lag");
  read(filter, "residual", cfg.residual, "filter");
  read(filter, "threshold", cfg.threshold, "filter");
  read(run, "seed", cfg.seed, "run");
  read(run, "threads", cfg.threads, "run");
  read(run, "verbose", cfg.verbose, "run");
  read(run, "out", cfg.out, "run");
}

void apply_config_file(const std::filesystem::path& path, AnalysisConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(buf.str(), cfg);
  // Relative input paths are resolved against the config file's directory.
  if (!cfg.input.empty() && std::filesystem::path(cfg.input).is_relative())
    cfg.input = (path.parent_path() / cfg.input).lexically_normal().string();
}

std::string canonical_config(const AnalysisConfig& cfg) {
  json j;
  j["data"] = {{"base", cfg.base},
               {"calendar", cfg.calendar},
               {"max-missing", cfg.max_missing},
               {"peg-tolerance", cfg.peg_tolerance}};
  j["scan"] = {{"q", cfg.q},
               {"s", cfg.s},
               {"poly-order", cfg.poly_order},
               {"global-normalization", cfg.global_normalization}};
  j["window"] = {{"window", cfg.window}, {"step", cfg.step}};
  j["network"] = {{"resolution", cfg.resolution}, {"anchors", cfg.anchors}};
  j["lag"] = {{"lags", cfg.lags}};
  j["filter"] = {{"residual", cfg.residual}, {"threshold", cfg.threshold}};
  j["run"] = {{"seed", cfg.seed}, {"verbose", cfg.verbose}};
  return j.dump();
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [section, keys] : layout())
    for (const auto& k : keys) out.push_back(section + "." + k);
  return out;
}

}  // namespace qdcca
