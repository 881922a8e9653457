#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "qdcca/config.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kFixture = fs::path(QDCCA_SOURCE_DIR) / "data" / "fixture5";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qdcca");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = qdcca::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

std::string line_with(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key, 0) == 0) return line;
  return {};
}

}  // namespace

TEST(Cli, ValidateFixture) {
  const auto r = cli({"validate", "--config", (kFixture / "qdcca.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["assets"].size(), 5u);
  EXPECT_EQ(j["excluded"][0]["ticker"], "USDC");
  EXPECT_EQ(j["windows"], 4);
}

TEST(Cli, HelpListsEveryKey) {
  const auto r = cli({"analyze", "--help"});
  EXPECT_EQ(r.code, 0);
  for (const auto& key : qdcca::config_keys()) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
    const std::string flag = "--" + key.substr(key.find('.') + 1);
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  }
}

TEST(Cli, UsageErrorsAreJson) {
  auto r = cli({"analyze", "--no-such-flag"});
  EXPECT_EQ(r.code, 2);
  auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"], "usage");
  r = cli({});
  EXPECT_EQ(r.code, 2);
  r = cli({"analyze", "--config", (kFixture / "qdcca.json").string(), "--q", "-1"});
  EXPECT_EQ(r.code, 1);
  j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"], "invalid-config");
  EXPECT_NE(j["message"].get<std::string>().find("'q'"), std::string::npos);
  r = cli({"validate", "--input", "/nonexistent/path.csv"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "io-error");
}

TEST(Cli, ParseErrorNamesFileAndLine) {
  const auto dir = scratch("qdcca_cli_bad");
  fs::create_directories(dir);
  std::ofstream(dir / "BAD.csv") << "timestamp,price\n0,1\n60,-2\n";
  std::ofstream(dir / "OK.csv") << "timestamp,price\n0,1\n60,2\n";
  const auto r = cli({"validate", "--input", dir.string()});
  EXPECT_EQ(r.code, 1);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"], "nonpositive-price");
  EXPECT_NE(j["message"].get<std::string>().find("BAD.csv:3"), std::string::npos) << r.err;
  fs::remove_all(dir);
}

TEST(Cli, AnalyzeTwiceSameHashes) {
  const auto a = scratch("qdcca_cli_a"), b = scratch("qdcca_cli_b");
  const auto cfg = (kFixture / "qdcca.json").string();
  const auto ra = cli({"analyze", "--config", cfg, "--out", a.string(), "--threads", "1"});
  const auto rb = cli({"analyze", "--config", cfg, "--out", b.string(), "--threads", "2"});
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_FALSE(line_with(ra.out, "output_hash").empty());
  EXPECT_EQ(line_with(ra.out, "output_hash"), line_with(rb.out, "output_hash"));
  EXPECT_EQ(line_with(ra.out, "config_hash"), line_with(rb.out, "config_hash"));
  std::ifstream ma(a / "manifest.json"), mb(b / "manifest.json");
  std::stringstream sa, sb;
  sa << ma.rdbuf();
  sb << mb.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, SubcommandsWriteTheirFamily) {
  const auto cfg = (kFixture / "qdcca.json").string();
  for (auto [sub, prefix] : std::vector<std::pair<std::string, std::string>>{
           {"spectra", "spectra_"}, {"mst", "topology_"}, {"clusters", "clusters_"},
           {"lagged", "lagged_"}, {"periods", "periods_"}}) {
    const auto dir = scratch("qdcca_cli_" + sub);
    const auto r = cli({sub, "--config", cfg, "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto m = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
    ASSERT_FALSE(m["files"].empty()) << sub;
    for (const auto& f : m["files"]) {
      const std::string name = f["name"];
      EXPECT_TRUE(name.rfind(prefix, 0) == 0 || (sub == "mst" && name.rfind("edges_", 0) == 0))
          << sub << ": " << name;
    }
    fs::remove_all(dir);
  }
}

TEST(Cli, SynthThenAnalyze) {
  const auto dir = scratch("qdcca_cli_synth");
  const auto out = dir / "out";
  auto r = cli({"synth", "--generator", "factor", "--n", "10", "--t", "50000", "--seed", "7", "--out",
                dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "A01.csv"));
  EXPECT_TRUE(fs::exists(dir / "qdcca.json"));
  r = cli({"analyze", "--config", (dir / "qdcca.json").string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = nlohmann::json::parse(std::ifstream(out / "manifest.json"));
  std::set<std::string> families;
  for (const auto& f : m["files"]) families.insert(f["family"].get<std::string>());
  EXPECT_EQ(families, (std::set<std::string>{"spectra", "topology", "edges", "clusters", "lagged",
                                             "periods"}));
  EXPECT_EQ(m["windows"], 28);
  fs::remove_all(dir);
}

TEST(Cli, PresetsAndOverrides) {
  const auto dir = scratch("qdcca_cli_synth_presets");
  ASSERT_EQ(cli({"synth", "--n", "3", "--t", "15000", "--out", dir.string()}).code, 0);
  auto r = cli({"validate", "--config", (dir / "qdcca.json").string(), "--preset", "10d", "--s", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["windows"], 1);
  r = cli({"validate", "--config", (dir / "qdcca.json").string(), "--window", "5000", "--step", "5000",
           "--s", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["windows"], 3);
  fs::remove_all(dir);
}
