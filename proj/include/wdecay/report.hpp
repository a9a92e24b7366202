#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wdecay/config.hpp"

namespace wdecay {

inline constexpr const char* kVersion = "0.3.0";

using Verdicts = std::vector<std::pair<std::string, bool>>;

// FNV-1a 64 over the canonical config JSON, output directory and thread count excluded.
std::string config_hash(const RunConfig& c);

nlohmann::json envelope(const RunConfig& c, const std::string& subcommand, nlohmann::json result,
                        const Verdicts& verdicts);

std::string dump(const nlohmann::json& j);
std::filesystem::path prepare_output(const std::string& dir);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace wdecay
