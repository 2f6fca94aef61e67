#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spaceprofiler {

/// Reader for the TOML subset used by calendar and pipeline files:
/// `[section]` headers, `key = value` lines, `#` comments, and values that
/// are quoted strings, numbers, booleans, or (possibly multi-line) arrays of
/// those scalars. Keys are addressed as `section.key`.
class TextConfig {
 public:
  using Scalar = std::variant<std::string, double, bool>;
  using Value = std::variant<Scalar, std::vector<Scalar>>;

  static TextConfig parse(std::istream& in, const std::string& source = "<input>");
  static TextConfig parse(std::string_view text, const std::string& source = "<input>");
  static TextConfig load(const std::filesystem::path& path);

  bool has(std::string_view key) const;
  std::vector<std::string> keys() const;

  std::optional<std::string> get_string(std::string_view key) const;
  std::optional<double> get_number(std::string_view key) const;
  std::optional<long long> get_integer(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;
  std::optional<std::vector<std::string>> get_string_array(std::string_view key) const;
  std::optional<std::vector<double>> get_number_array(std::string_view key) const;

 private:
  const Value* find(std::string_view key) const;

  std::string source_;
  std::map<std::string, Value, std::less<>> values_;
};

/// Quotes and escapes a string for writing a TextConfig value.
std::string quote_config_string(std::string_view s);

/// Shortest round-trippable decimal form of a double.
std::string format_config_number(double v);

}  // namespace spaceprofiler
