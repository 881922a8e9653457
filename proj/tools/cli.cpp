#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>

#include "qdcca/config.hpp"
#include "qdcca/error.hpp"
#include "qdcca/output.hpp"
#include "qdcca/pipeline.hpp"
#include "qdcca/quotes.hpp"
#include "qdcca/synth.hpp"

namespace qdcca {

namespace {

/// Flag values; only the flags actually given override the config file.
struct Overrides {
  std::string config;
  std::string preset;
  std::optional<std::string> input, out, base, calendar;
  std::optional<std::vector<double>> q;
  std::optional<std::vector<std::size_t>> s;
  std::optional<int> poly_order, threads;
  std::optional<std::size_t> window, step;
  std::optional<std::vector<long>> lags;
  std::optional<std::vector<std::string>> anchors;
  std::optional<double> threshold, resolution, max_missing, peg_tolerance;
  std::optional<std::uint64_t> seed;
  std::optional<bool> residual, verbose, global_normalization;
};

struct SynthOptions {
  std::string generator = "factor";
  std::size_t n = 10;
  std::size_t t = 50000;
  std::uint64_t seed = 0;
  std::string out = "synth-data";
  double rho = 0.7;
  double phi = 0.9;
  std::vector<std::size_t> blocks;
  double within = 0.8;
  double across = 0.0;
  double max_delay = 30.0;
  double volatility = 1e-3;
  bool wide = false;
};

void add_analysis_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--preset", o.preset, "window preset: 7d (10080/1440) or 10d (14400/1440)")
      ->check(CLI::IsMember({"7d", "10d"}));
  app->add_option("--input", o.input, "price CSV file or directory [data.input]");
  app->add_option("--out", o.out, "output directory [run.out]");
  app->add_option("--base", o.base, "ticker to re-base prices in, if present [data.base]");
  app->add_option("--calendar", o.calendar, "continuous | intersect [data.calendar]");
  app->add_option("--max-missing", o.max_missing,
                  "largest filled fraction per window [data.max-missing]");
  app->add_option("--peg-tolerance", o.peg_tolerance,
                  "|ln p| bound for pegged assets [data.peg-tolerance]");
  app->add_option("--q", o.q, "q values [scan.q]")->delimiter(',');
  app->add_option("--s", o.s, "scales in samples [scan.s]")->delimiter(',');
  app->add_option("--poly-order", o.poly_order, "detrending order m [scan.poly-order]");
  app->add_flag("--global-normalization{true},!--no-global-normalization", o.global_normalization,
                "standardise full series instead of each window [scan.global-normalization]");
  app->add_option("--window", o.window, "window width in samples [window.window]");
  app->add_option("--step", o.step, "window step in samples [window.step]");
  app->add_option("--resolution", o.resolution, "Louvain resolution [network.resolution]");
  app->add_option("--anchors", o.anchors, "anchor tickers [network.anchors]")->delimiter(',');
  app->add_option("--lags", o.lags, "lags in samples [lag.lags]")->delimiter(',');
  app->add_flag("--residual{true},!--no-residual", o.residual,
                "add the residual-filtered spectra [filter.residual]");
  app->add_option("--threshold", o.threshold, "period threshold [filter.threshold]");
  app->add_option("--seed", o.seed, "tie-break seed [run.seed]");
  app->add_option("--threads", o.threads, "worker threads, 0 = all [run.threads]");
  app->add_flag("--verbose{true},!--no-verbose", o.verbose, "extra diagnostic columns [run.verbose]");
}

AnalysisConfig resolve(const Overrides& o) {
  AnalysisConfig cfg;
  if (!o.config.empty()) apply_config_file(o.config, cfg);
  if (o.preset == "7d") {
    cfg.window = 10080;
    cfg.step = 1440;
  } else if (o.preset == "10d") {
    cfg.window = 14400;
    cfg.step = 1440;
  }
  if (o.input) cfg.input = *o.input;
  if (o.out) cfg.out = *o.out;
  if (o.base) cfg.base = *o.base;
  if (o.calendar) cfg.calendar = *o.calendar;
  if (o.max_missing) cfg.max_missing = *o.max_missing;
  if (o.peg_tolerance) cfg.peg_tolerance = *o.peg_tolerance;
  if (o.q) cfg.q = *o.q;
  if (o.s) cfg.s = *o.s;
  if (o.poly_order) cfg.poly_order = *o.poly_order;
  if (o.global_normalization) cfg.global_normalization = *o.global_normalization;
  if (o.window) cfg.window = *o.window;
  if (o.step) cfg.step = *o.step;
  if (o.resolution) cfg.resolution = *o.resolution;
  if (o.anchors) cfg.anchors = *o.anchors;
  if (o.lags) cfg.lags = *o.lags;
  if (o.residual) cfg.residual = *o.residual;
  if (o.threshold) cfg.threshold = *o.threshold;
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.verbose) cfg.verbose = *o.verbose;
  cfg.validate();
  if (cfg.input.empty()) throw Error(ErrorKind::kInvalidConfig, "config key 'input': no input given");
  return cfg;
}

void report(std::ostream& err, std::string_view kind, const std::string& message) {
  err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
}

int analyze(const Overrides& o, unsigned stages, std::ostream& out) {
  const AnalysisConfig cfg = resolve(o);
  const PreparedData data = prepare_data(load_quotes(cfg.input), cfg);
  const AnalysisResult result = run_analysis(cfg, data.returns, stages);
  const RunSummary summary = write_outputs(result, data, cfg, stages, cfg.out);
  out << "assets " << result.tickers.size() << ", windows " << result.windows.size()
      << ", skipped " << result.skips.size() << ", files " << summary.files.size() + 1 << "\n"
      << "config_hash " << summary.config_hash << "\n"
      << "output_hash " << summary.output_hash << "\n";
  return 0;
}

int validate(const Overrides& o, std::ostream& out) {
  const AnalysisConfig cfg = resolve(o);
  const std::vector<QuoteSeries> quotes = load_quotes(cfg.input);
  const PreparedData data = prepare_data(quotes, cfg);
  const auto windows = rolling_windows(data.returns.timestamps, WindowPlan{cfg.window, cfg.step});
  nlohmann::json s;
  s["status"] = "ok";
  s["series"] = quotes.size();
  s["assets"] = data.returns.tickers;
  s["samples"] = data.returns.cols();
  s["first"] = format_timestamp(data.returns.timestamps.front());
  s["last"] = format_timestamp(data.returns.timestamps.back());
  s["windows"] = windows.size();
  s["prices"] = data.base_mode;
  nlohmann::json ex = nlohmann::json::array();
  for (const auto& e : data.excluded) ex.push_back({{"ticker", e.ticker}, {"reason", e.reason}});
  s["excluded"] = ex;
  s["config_hash"] = fnv1a_hex(canonical_config(cfg));
  out << s.dump(2) << "\n";
  return 0;
}

int synth(const SynthOptions& o, std::ostream& out) {
  GeneratorSpec spec;
  spec.kind = parse_generator(o.generator);
  spec.assets = o.n;
  spec.length = o.t;
  spec.rho = o.rho;
  spec.phi = o.phi;
  spec.blocks = o.blocks;
  spec.within = o.within;
  spec.across = o.across;
  spec.max_delay = o.max_delay;
  spec.volatility = o.volatility;
  const std::vector<QuoteSeries> quotes = synth_quotes(spec, o.seed);

  const std::filesystem::path dir(o.out);
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  };
  if (o.wide) {
    std::string text = "timestamp";
    for (const auto& q : quotes) text += "," + q.ticker;
    text += "\n";
    for (std::size_t t = 0; t < quotes.front().size(); ++t) {
      text += std::to_string(quotes.front().timestamps[t] * 60);
      for (const auto& q : quotes) text += "," + format_number(q.prices[t]);
      text += "\n";
    }
    write(dir / "prices.csv", text);
  } else {
    for (const auto& q : quotes) {
      std::string text = "timestamp,price\n";
      for (std::size_t t = 0; t < q.size(); ++t)
        text += std::to_string(q.timestamps[t] * 60) + "," + format_number(q.prices[t]) + "\n";
      write(dir / (q.ticker + ".csv"), text);
    }
  }
  // Synthetic tickers carry no BTC/ETH, so the companion config anchors the
  // lag and cluster passes on the first two series.
  nlohmann::json cfg;
  cfg["data"]["input"] = o.wide ? "prices.csv" : ".";
  std::vector<std::string> anchors;
  for (std::size_t i = 0; i < quotes.size() && i < 2; ++i) anchors.push_back(quotes[i].ticker);
  cfg["network"]["anchors"] = anchors;
  cfg["run"]["seed"] = o.seed;
  write(dir / "qdcca.json", cfg.dump(2) + "\n");
  out << "wrote " << quotes.size() << " series of " << quotes.front().size() << " quotes to "
      << dir.string() << "\n";
  return 0;
}

std::string keys_footer() {
  std::string text = "\nConfig keys (JSON sections; flags use the key name):\n";
  for (const auto& k : config_keys()) text += "  " + k + "\n";
  return text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detrended cross-correlation analysis of minute price series", "qdcca"};
  app.require_subcommand(1);
  app.footer(keys_footer());

  Overrides o;
  SynthOptions so;
  struct Sub {
    const char* name;
    const char* help;
    unsigned stages;
  };
  const Sub subs[] = {
      {"analyze", "full sweep: every output family", kStageAll},
      {"spectra", "eigenvalue and entropy series", kStageSpectra},
      {"mst", "minimum spanning trees and topology", kStageNetwork},
      {"clusters", "Louvain communities tracked around each anchor", kStageClusters},
      {"lagged", "anchor-averaged lagged correlations", kStageLagged},
      {"periods", "anchor pair runs above the threshold", kStagePeriods},
  };
  std::vector<CLI::App*> analysis;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->footer(keys_footer());
    add_analysis_flags(sub, o);
    analysis.push_back(sub);
  }
  CLI::App* val = app.add_subcommand("validate", "check input files and config without computing");
  val->footer(keys_footer());
  add_analysis_flags(val, o);

  CLI::App* syn = app.add_subcommand("synth", "write synthetic price files");
  syn->add_option("--generator", so.generator, "gaussian | correlated | ar1 | factor | blocks | epps");
  syn->add_option("--n", so.n, "number of assets");
  syn->add_option("--t", so.t, "returns per asset");
  syn->add_option("--seed", so.seed, "random seed");
  syn->add_option("--out", so.out, "output directory");
  syn->add_option("--rho", so.rho, "equicorrelation (correlated)");
  syn->add_option("--phi", so.phi, "AR(1) coefficient");
  syn->add_option("--blocks", so.blocks, "block sizes (blocks)")->delimiter(',');
  syn->add_option("--within", so.within, "within-block correlation");
  syn->add_option("--across", so.across, "across-block correlation");
  syn->add_option("--max-delay", so.max_delay, "largest response delay (epps)");
  syn->add_option("--volatility", so.volatility, "per-minute log-return sd");
  syn->add_flag("--wide", so.wide, "one wide CSV instead of one file per ticker");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report(err, "usage", e.what());
    return 2;
  }

  try {
    for (std::size_t i = 0; i < analysis.size(); ++i)
      if (analysis[i]->parsed()) return analyze(o, subs[i].stages, out);
    if (val->parsed()) return validate(o, out);
    if (syn->parsed()) return synth(so, out);
  } catch (const Error& e) {
    report(err, to_string(e.kind()), e.what());
    return 1;
  } catch (const std::exception& e) {
    report(err, "internal", e.what());
    return 1;
  }
  return 2;
}

}  // namespace qdcca
