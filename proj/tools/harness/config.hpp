#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vmkl::harness {

/// Flat key=value experiment configuration.
///
/// Text form: one `key = value` per line, `#` starts a comment, blank lines are
/// ignored. Later assignments win. `to_text` writes keys in sorted order so two
/// equal configs serialize identically.
class Config
{
public:
  Config() = default;

  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  std::string to_text() const;
  void save(const std::string& path) const;

  /// Values of `other` override ours.
  void merge(const Config& other);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set_default(const std::string& key, const std::string& value);

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list of numbers.
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

} // namespace vmkl::harness
