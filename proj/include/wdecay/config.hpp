#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wdecay/cascade.hpp"
#include "wdecay/model.hpp"
#include "wdecay/mourre.hpp"

namespace wdecay {

struct ProbeConfig {
  int stage = 1;
  double s = 1.0;
  std::vector<double> lambdas{-0.5, 0.5, 1.5};
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
  std::size_t dense_limit = 2000;
};

struct RunConfig {
  ModelSpec model;
  std::optional<double> g;  // absolute coupling
  double g_fraction = 1e-3;  // g = g_fraction * g_delta1 when g is absent
  CascadeOptions cascade;
  std::vector<int> mourre_stages{1, 2, 3};
  MourreOptions mourre;
  ProbeConfig probe;
  int samples = 100;
  int smeared_samples = 20;
  unsigned seed = 1;
  int threads = 0;  // 0 keeps the OpenMP default
  std::string out = "out";
  RunMode mode = RunMode::Certify;
};

RunConfig parse_config(const std::string& path);
// base_dir resolves a relative kernel table path.
RunConfig parse_config_string(const std::string& text, const std::string& base_dir = ".");

// Every violated invariant; empty when the config is usable.
std::vector<std::string> validate(const RunConfig& c);

double coupling(const RunConfig& c, const ConstantLedger& l);

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

// Canonical form: every field, defaults filled in.
nlohmann::json to_json(const RunConfig& c);

}  // namespace wdecay
