#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crosstune/model_update.hpp"
#include "crosstune/simulation.hpp"
#include "crosstune/types.hpp"

namespace crosstune {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Minimal TOML reader covering what the config files use: `[section]`
/// headers, `key = value` pairs, `#` comments, strings, integers, floats,
/// booleans, and flat arrays of numbers.
class TomlTable {
 public:
  struct Value {
    enum class Kind { kString, kInt, kFloat, kBool, kArray };
    Kind kind = Kind::kString;
    std::string str;
    std::int64_t integer = 0;
    double real = 0.0;
    bool boolean = false;
    std::vector<double> array;
    bool array_is_integral = false;
    int line = 0;
  };

  static TomlTable parse_file(const std::string& path);
  static TomlTable parse_string(const std::string& text,
                                const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  const Value* find(const std::string& section, const std::string& key) const;

  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& section, const std::string& key,
                         std::uint64_t fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  /// Two-element inclusive integer range, e.g. `g_multipliers = [2, 5]`.
  std::pair<int, int> get_int_range(const std::string& section,
                                    const std::string& key,
                                    std::pair<int, int> fallback) const;

  /// Throws ConfigError when a key outside `known` exists in `section`.
  void reject_unknown_keys(const std::string& section,
                           const std::vector<std::string>& known) const;
  /// Throws ConfigError when a section outside `known` exists.
  void reject_unknown_sections(const std::vector<std::string>& known) const;

  const std::string& origin() const { return origin_; }

 private:
  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const Value& value, const std::string& expected) const;

  std::string origin_;
  std::map<std::pair<std::string, std::string>, Value> values_;
};

struct RunConfig {
  HyperParams hyper;
  SimConfig sim;
  TrainConfig train;
};

/// Parses and validates the [hyper], [sim] and [train] sections. Missing
/// keys fall back to the documented defaults; unknown keys or sections are
/// rejected with their field names.
RunConfig load_config(const std::string& path);
RunConfig bind_config(const TomlTable& table);

}  // namespace crosstune
