#include <string>

#include <gtest/gtest.h>

#include "wdecay/config.hpp"
#include "wdecay/errors.hpp"

using namespace wdecay;

namespace {

std::string message_of(const std::string& yaml, ErrorCode expected) {
  try {
    parse_config_string(yaml);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), expected) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << yaml;
  return {};
}

}  // namespace

TEST(Config, EmptyDocumentGivesDefaults) {
  const RunConfig c = parse_config_string("");
  EXPECT_EQ(c.model.physics.masses.m1, 1.0);
  EXPECT_EQ(c.model.physics.masses.mW, 80.0);
  EXPECT_EQ(c.model.physics.delta, 0.5);
  EXPECT_EQ(c.model.grid.shells, 6u);
  EXPECT_FALSE(c.g.has_value());
  EXPECT_EQ(c.g_fraction, 1e-3);
  EXPECT_EQ(c.mode, RunMode::Certify);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_TRUE(validate(c).empty());
}

TEST(Config, ReadsNestedValues) {
  const RunConfig c = parse_config_string(
      "physics: {m1: 0.9, delta: 0.3, g: 1.0e-7}\n"
      "grid: {shells: 9, scheme: gauss}\n"
      "caps: {neutrino: 3}\n"
      "cascade: {nmax: 3}\n"
      "mourre: {stages: [2], mode: formula}\n"
      "run: {seed: 42, mode: explore}\n");
  EXPECT_EQ(c.model.physics.masses.m1, 0.9);
  EXPECT_EQ(c.model.physics.delta, 0.3);
  ASSERT_TRUE(c.g.has_value());
  EXPECT_EQ(*c.g, 1e-7);
  EXPECT_EQ(c.model.grid.shells, 9u);
  EXPECT_EQ(c.model.grid.scheme, QuadratureScheme::Gauss);
  EXPECT_EQ(c.model.caps.neutrino, 3u);
  EXPECT_EQ(c.model.nmax, 3);
  EXPECT_EQ(c.mourre_stages, std::vector<int>{2});
  EXPECT_EQ(c.mourre.mode, CommutatorMode::Formula);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.mode, RunMode::Explore);
}

TEST(Config, DeltaViolationNamed) {
  const std::string msg = message_of("physics: {delta: 1.5}\n", ErrorCode::ValidationError);
  EXPECT_NE(msg.find("0 < δ < m₁ violated"), std::string::npos) << msg;
}

TEST(Config, LambdaViolationNamed) {
  const std::string msg = message_of("physics: {lambda: 0.5}\n", ErrorCode::ValidationError);
  EXPECT_NE(msg.find("Λ > m₁ violated"), std::string::npos) << msg;
}

TEST(Config, EveryViolationListed) {
  const std::string msg = message_of("physics: {delta: 1.5, lambda: 0.5}\n", ErrorCode::ValidationError);
  EXPECT_NE(msg.find("δ"), std::string::npos);
  EXPECT_NE(msg.find("Λ"), std::string::npos);
  EXPECT_NE(msg.find("; "), std::string::npos);
}

TEST(Config, UnknownKeyReportsLineAndKey) {
  const std::string msg = message_of("physics:\n  m1: 1.0\n  mass_w: 80\n", ErrorCode::ParseError);
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("physics.mass_w"), std::string::npos) << msg;
}

TEST(Config, UnknownSectionRejected) {
  const std::string msg = message_of("physic: {m1: 1.0}\n", ErrorCode::ParseError);
  EXPECT_NE(msg.find("physic"), std::string::npos);
}

TEST(Config, BadTypeRejected) {
  const std::string msg = message_of("grid:\n  shells: many\n", ErrorCode::ParseError);
  EXPECT_NE(msg.find("grid.shells"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(Config, BadEnumRejected) {
  message_of("run: {mode: maybe}\n", ErrorCode::ParseError);
  message_of("kernel: {family: lorentzian}\n", ErrorCode::ParseError);
}

TEST(Config, MalformedYamlRejected) { message_of("physics: [1, 2\n", ErrorCode::ParseError); }

TEST(Config, CanonicalJsonRoundTrips) {
  const RunConfig c = parse_config_string(
      "physics: {g: 2.0e-8, beta: 0.5}\ngrid: {shells: 7}\nmourre: {C_delta: 0.2}\nrun: {seed: 9}\n");
  const nlohmann::json j = to_json(c);
  const RunConfig back = parse_config_string(j.dump());
  EXPECT_EQ(to_json(back), j);
}

TEST(Config, CouplingFromFraction) {
  RunConfig c = parse_config_string("physics: {g_fraction: 0.25}\n");
  ConstantLedger l;
  l.g_delta1 = 0.4;
  EXPECT_DOUBLE_EQ(coupling(c, l), 0.1);
  c.g = 0.3;
  EXPECT_DOUBLE_EQ(coupling(c, l), 0.3);
}

TEST(Config, DefaultConfigFileParses) {
  const RunConfig c = parse_config(std::string(WDECAY_SOURCE_DIR) + "/configs/default.yaml");
  EXPECT_EQ(c.model.grid.massive_shells, 2u);
  EXPECT_EQ(c.model.nmax, 4);
  EXPECT_EQ(c.model.caps.neutrino, 1u);
}

TEST(Config, MissingFileIsIoError) {
  try {
    parse_config("/nonexistent/config.yaml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}
