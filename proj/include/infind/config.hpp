#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace infind {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain `key = value` configuration. Blank lines and `#` comments are
/// ignored; a repeated key is an error. Every typed read marks the key as
/// used so callers can reject unknown keys.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<input>");
  static KeyValueConfig parse_string(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated items, each a number or an inclusive range `a-b`.
  std::vector<std::uint64_t> get_seed_list(const std::string& key, const std::vector<std::uint64_t>& fallback) const;
  std::vector<long> get_long_list(const std::string& key, const std::vector<long>& fallback) const;

  std::vector<std::string> unused_keys() const;
  /// Throws ConfigError naming every key that was never read.
  void reject_unused() const;

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace infind
