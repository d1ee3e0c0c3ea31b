#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace prefband::cli {

/// Parsed key/value pairs from a config file. Two shapes are accepted:
///   - line-oriented `key = value` text with optional [section] headers
///     (sections organize keys per module and are flattened away), and
///   - a flat JSON object, so a run's own config.resolved.json can be fed
///     straight back through --config.
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::vector<std::pair<std::string, std::string>> items;

  std::size_t first = 0;
  while (first < text.size() && std::isspace(static_cast<unsigned char>(text[first]))) ++first;
  if (first < text.size() && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument("bad JSON config '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("JSON config must be a flat object");
    for (const auto& [key, value] : j.items()) {
      if (value.is_string()) {
        items.emplace_back(key, value.get<std::string>());
      } else if (value.is_boolean()) {
        items.emplace_back(key, value.get<bool>() ? "true" : "false");
      } else {
        items.emplace_back(key, value.dump());
      }
    }
    return items;
  }

  std::istringstream lines(text);
  std::string line;
  const auto strip = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(lines, line)) {
    line = strip(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') continue;  // section header
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line missing '=' in '" + path + "': " + line);
    std::string value = strip(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    items.emplace_back(strip(line.substr(0, eq)), value);
  }
  return items;
}

/// Registers --config on a subcommand. The file is applied after parsing
/// (see apply_config_file) so explicit flags always win.
inline CLI::Option* add_config_option(CLI::App* cmd, std::string& storage) {
  return cmd->add_option("--config", storage,
                         "Config file: key = value text or a resolved JSON object");
}

/// Applies config-file values to every option the command knows and the
/// command line did not set. Unknown keys (such as the `command` echo in a
/// resolved config) are ignored.
inline void apply_config_file(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  for (const auto& [key, value] : read_config_file(path)) {
    CLI::Option* op = cmd->get_option_no_throw("--" + key);
    if (op == nullptr || op->count() > 0) continue;
    op->add_result(value);
    op->run_callback();
  }
}

}  // namespace prefband::cli
