#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace snowlens::cli {

// Bad command line, unknown option or unparsable setting. Maps to exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OptKind { text, integer, real, flag };

struct OptionSpec {
  std::string name;  // flag name without leading dashes
  OptKind kind = OptKind::text;
  nlohmann::json default_value;  // null: unset unless supplied
  std::string help;
  bool required = false;
  std::vector<std::string> choices;  // text options only; empty = free
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<OptionSpec> options;

  const OptionSpec* find(std::string_view option) const;
};

const std::vector<CommandSpec>& command_specs();
// Throws UsageError for an unknown command.
const CommandSpec& command_spec(std::string_view name);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

// "restore-size" -> "SNOWLENS_RESTORE_SIZE"
std::string env_name(std::string_view option);

struct RunConfig {
  std::string command;
  nlohmann::json values = nlohmann::json::object();  // every option, null when unset
  std::map<std::string, std::string> sources;         // default, file, env or flag

  bool has(const std::string& name) const;
  std::string text(const std::string& name) const;
  std::int64_t integer(const std::string& name) const;
  double real(const std::string& name) const;
  bool flag(const std::string& name) const;
  std::uint64_t seed() const;

  // Resolved settings without the output location, so that identical runs
  // into different directories snapshot identically.
  nlohmann::json snapshot() const;
};

// Merges defaults < config file < environment < flags. `flags` holds only the
// options present on the command line, as raw strings. The config file comes
// from the "config" option (flag or SNOWLENS_CONFIG); its top-level keys
// apply to every command declaring them and an object under the command name
// overrides them.
RunConfig resolve_config(const CommandSpec& spec, const std::map<std::string, std::string>& flags,
                         const EnvLookup& env = process_env);

}  // namespace snowlens::cli
