#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace eatool {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration. Lines starting with '#' are comments;
/// values may be bare or double-quoted; lists are comma-separated. Every
/// lookup records the value it resolved to (including defaults), so the
/// effective configuration can be echoed into artifacts and replayed.
class Config {
 public:
  Config() = default;
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value) { raw_[key] = value; }
  /// Adds a derived value to the effective configuration.
  void record(const std::string& key, const std::string& value) { effective_[key] = value; }
  bool has(const std::string& key) const { return raw_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback);
  long get_int(const std::string& key, long fallback);
  /// Positive integer; rejects zero and negatives.
  long get_count(const std::string& key, long fallback);
  double get_double(const std::string& key, double fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  std::vector<long> get_int_list(const std::string& key, const std::vector<long>& fallback);
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback);

  /// Keys present in the file that no lookup consumed.
  std::vector<std::string> unused() const;

  /// Every consulted key with its resolved value, in key order.
  const std::map<std::string, std::string>& effective() const { return effective_; }
  const std::map<std::string, std::string>& raw() const { return raw_; }

 private:
  const std::string* lookup(const std::string& key);

  std::map<std::string, std::string> raw_;
  std::map<std::string, std::string> effective_;
};

/// Shortest round-trip text for a double.
std::string format_double(double x);

}  // namespace eatool
