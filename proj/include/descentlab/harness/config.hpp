#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace descentlab::harness {

enum class ParamType { integer, real, text, integer_list, real_list };

struct ParamSpec {
  std::string key;
  ParamType type;
  std::string default_value;  ///< in the config-file syntax
  std::string help;
};

using ParamValue =
    std::variant<std::int64_t, double, std::string, std::vector<std::int64_t>, std::vector<double>>;

/// Validated experiment configuration. Every key of the experiment's schema
/// is present (defaults filled in).
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string output_path;
  std::size_t threads = 1;
  std::map<std::string, ParamValue> params;

  [[nodiscard]] std::int64_t integer(const std::string& key) const;
  [[nodiscard]] std::size_t count(const std::string& key) const;  ///< nonnegative integer
  [[nodiscard]] double real(const std::string& key) const;
  [[nodiscard]] const std::string& text(const std::string& key) const;
  [[nodiscard]] std::vector<std::size_t> counts(const std::string& key) const;
  [[nodiscard]] const std::vector<double>& reals(const std::string& key) const;

  /// `key = value` lines (sorted, canonical values) for the result-determining
  /// keys: experiment, seed and the experiment parameters. `output` and
  /// `threads` are omitted because they never change results.
  [[nodiscard]] std::vector<std::string> echo() const;
};

/// Raw `key = value` pairs. Blank lines and lines starting with `#` are
/// ignored. Throws ConfigError on malformed lines or duplicate keys.
std::map<std::string, std::string> parse_config_text(std::string_view text);

std::map<std::string, std::string> read_config_file(const std::string& path);

const std::vector<std::string>& experiment_names();

/// Experiment-specific parameters (not including experiment/seed/output/threads).
const std::vector<ParamSpec>& experiment_schema(std::string_view experiment);

struct Overrides {
  std::optional<std::string> experiment;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_path;
  std::optional<std::size_t> threads;
};

/// Applies overrides, checks the experiment name, rejects unknown keys,
/// type-checks and fills defaults. Throws ConfigError.
ExperimentConfig resolve_config(const std::map<std::string, std::string>& raw,
                                const Overrides& overrides = {});

std::string format_param(const ParamValue& v);

}  // namespace descentlab::harness
