#include "wdecay/report.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "wdecay/errors.hpp"

namespace wdecay {

namespace {

nlohmann::json reported_config(const RunConfig& c) {
  nlohmann::json j = to_json(c);
  j["run"].erase("out");
  j["run"].erase("threads");
  return j;
}

}  // namespace

std::string config_hash(const RunConfig& c) {
  const std::string text = reported_config(c).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json envelope(const RunConfig& c, const std::string& subcommand, nlohmann::json result,
                        const Verdicts& verdicts) {
  nlohmann::json v = nlohmann::json::array();
  bool passed = true;
  for (const auto& [name, ok] : verdicts) {
    v.push_back({{"name", name}, {"passed", ok}});
    passed = passed && ok;
  }
  return {{"tool", "wdecay"},
          {"version", kVersion},
          {"subcommand", subcommand},
          {"config_hash", config_hash(c)},
          {"seed", c.seed},
          {"mode", to_string(c.mode)},
          {"config", reported_config(c)},
          {"result", std::move(result)},
          {"verdicts", v},
          {"passed", passed}};
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::filesystem::path prepare_output(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cli", "prepare_output", "cannot create " + dir + ": " + ec.message());
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cli", "write_text", "cannot write " + path.string());
  out << text;
}

}  // namespace wdecay
