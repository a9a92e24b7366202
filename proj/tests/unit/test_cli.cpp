#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "wdecay/cli.hpp"
#include "wdecay/config.hpp"
#include "wdecay/report.hpp"

using namespace wdecay;
namespace fs = std::filesystem;

namespace {

std::string config_path(const std::string& name) { return std::string(WDECAY_SOURCE_DIR) + "/configs/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wdecay_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& sub, RunConfig c, const fs::path& out, std::string* err_text = nullptr) {
  c.out = out.string();
  std::ostringstream log, err;
  const int code = dispatch(sub, c, log, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST(Cli, SubcommandList) {
  const std::vector<std::string>& s = subcommands();
  for (const char* name : {"check-algebra", "verify-bounds", "constants", "thresholds", "spectrum", "cascade", "mourre",
                           "probe"}) {
    EXPECT_NE(std::find(s.begin(), s.end(), name), s.end()) << name;
  }
}

TEST(Cli, ConstantsPassesOnDefaultConfig) {
  const fs::path out = scratch("constants");
  EXPECT_EQ(run("constants", parse_config(config_path("default.yaml")), out), kExitPass);
  const nlohmann::json j = nlohmann::json::parse(slurp(out / "constants.json"));
  EXPECT_EQ(j["subcommand"], "constants");
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["config_hash"], config_hash(parse_config(config_path("default.yaml"))));
}

TEST(Cli, CheckAlgebraPasses) {
  EXPECT_EQ(run("check-algebra", parse_config(config_path("algebra.yaml")), scratch("algebra")), kExitPass);
}

TEST(Cli, ThresholdViolationExitCode) {
  RunConfig c = parse_config(config_path("explore.yaml"));
  c.mode = RunMode::Certify;
  std::string err;
  EXPECT_EQ(run("constants", c, scratch("threshold"), &err), kExitThreshold);
  EXPECT_NE(err.find("ThresholdViolated"), std::string::npos) << err;
}

TEST(Cli, UnknownSubcommandIsInfrastructureError) {
  EXPECT_EQ(run("frobnicate", parse_config_string(""), scratch("unknown")), kExitInfrastructure);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const RunConfig c = parse_config(config_path("algebra.yaml"));
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(run("check-algebra", c, a), kExitPass);
  ASSERT_EQ(run("check-algebra", c, b), kExitPass);
  EXPECT_EQ(slurp(a / "check-algebra.json"), slurp(b / "check-algebra.json"));
}

TEST(Cli, HashIgnoresOutputAndThreads) {
  RunConfig c = parse_config_string("");
  const std::string h = config_hash(c);
  EXPECT_EQ(h, config_hash(c));
  c.out = "elsewhere";
  c.threads = 3;
  EXPECT_EQ(h, config_hash(c));
  c.seed = 2;
  EXPECT_NE(h, config_hash(c));
}

TEST(Cli, EnvelopeCarriesVerdicts) {
  const RunConfig c = parse_config_string("");
  const nlohmann::json e = envelope(c, "constants", {{"x", 1}}, {{"a", true}, {"b", false}});
  EXPECT_EQ(e["tool"], "wdecay");
  EXPECT_EQ(e["version"], kVersion);
  EXPECT_EQ(e["verdicts"].size(), 2u);
  EXPECT_FALSE(e["passed"].get<bool>());
  EXPECT_EQ(e["result"]["x"], 1);
}
