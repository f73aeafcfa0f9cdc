#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vmkl::harness {

namespace {

std::string trim(const std::string& s)
{
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos)
    return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* type)
{
  throw std::invalid_argument("config key '" + key + "' has value '" + value + "', expected " + type);
}

} // namespace

std::string format_double(double value)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

Config Config::parse(const std::string& text)
{
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(number) + " is not key=value: " + line);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(number) + " has an empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Config::to_text() const
{
  std::ostringstream out;
  for (const auto& [k, v] : values_)
    out << k << " = " << v << '\n';
  return out.str();
}

void Config::save(const std::string& path) const
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write config file " + path);
  out << to_text();
}

void Config::merge(const Config& other)
{
  for (const auto& [k, v] : other.values_)
    values_[k] = v;
}

void Config::set(const std::string& key, double value)
{
  values_[key] = format_double(value);
}

void Config::set(const std::string& key, std::int64_t value)
{
  values_[key] = std::to_string(value);
}

void Config::set_default(const std::string& key, const std::string& value)
{
  values_.emplace(key, value);
}

std::string Config::get(const std::string& key, const std::string& fallback) const
{
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const
{
  const auto it = values_.find(key);
  if (it == values_.end())
    return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size())
      bad_value(key, it->second, "a number");
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, it->second, "a number");
  }
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const
{
  const auto it = values_.find(key);
  if (it == values_.end())
    return fallback;
  std::int64_t v = 0;
  const auto& s = it->second;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    bad_value(key, s, "an integer");
  return v;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const
{
  const auto it = values_.find(key);
  if (it == values_.end())
    return fallback;
  std::uint64_t v = 0;
  const auto& s = it->second;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    bad_value(key, s, "a non-negative integer");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
  const auto it = values_.find(key);
  if (it == values_.end())
    return fallback;
  const auto& s = it->second;
  if (s == "1" || s == "true" || s == "yes" || s == "on")
    return true;
  if (s == "0" || s == "false" || s == "no" || s == "off")
    return false;
  bad_value(key, s, "a boolean");
}

std::vector<std::string> Config::get_strings(const std::string& key, const std::vector<std::string>& fallback) const
{
  const auto it = values_.find(key);
  if (it == values_.end())
    return fallback;
  std::vector<std::string> out;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty())
      out.push_back(item);
  }
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const
{
  if (!has(key))
    return fallback;
  std::vector<double> out;
  for (const auto& item : get_strings(key, {})) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      bad_value(key, item, "a comma-separated list of numbers");
    }
  }
  return out;
}

} // namespace vmkl::harness
