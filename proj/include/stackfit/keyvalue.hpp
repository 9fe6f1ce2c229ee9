#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stackfit {

/// Plain-text `key: value` configuration. One entry per line; blank lines and
/// lines starting with '#' are ignored; keys are trimmed and case-sensitive;
/// the value is everything after the first ':' with surrounding whitespace
/// removed. A repeated key is an error.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text);
  static KeyValueFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;

  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  /// Whitespace- or comma-separated numbers.
  std::vector<double> get_doubles(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  /// Keys in sorted order, "key: value\n" each.
  std::string to_string() const;

 private:
  std::map<std::string, std::string> values_;
};

std::vector<double> parse_number_list(const std::string& text);

}  // namespace stackfit
