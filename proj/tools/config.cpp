#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace eatool {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else {
      const auto hash = value.find(" #");
      if (hash != std::string::npos) value = trim(value.substr(0, hash));
    }
    if (cfg.raw_.count(key)) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    cfg.raw_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

const std::string* Config::lookup(const std::string& key) {
  auto it = raw_.find(key);
  return it == raw_.end() ? nullptr : &it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
  const std::string* v = lookup(key);
  const std::string out = v ? *v : fallback;
  effective_[key] = out;
  return out;
}

long Config::get_int(const std::string& key, long fallback) {
  const std::string* v = lookup(key);
  const long out = v ? parse_number<long>(key, *v) : fallback;
  effective_[key] = std::to_string(out);
  return out;
}

long Config::get_count(const std::string& key, long fallback) {
  const long out = get_int(key, fallback);
  if (out < 1) throw ConfigError("key '" + key + "' must be a positive integer");
  return out;
}

double Config::get_double(const std::string& key, double fallback) {
  const std::string* v = lookup(key);
  const double out = v ? parse_number<double>(key, *v) : fallback;
  effective_[key] = format_double(out);
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) {
  const std::string* v = lookup(key);
  bool out = fallback;
  if (v) {
    if (*v == "true" || *v == "1") out = true;
    else if (*v == "false" || *v == "0") out = false;
    else throw ConfigError("key '" + key + "': expected true or false");
  }
  effective_[key] = out ? "true" : "false";
  return out;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) {
  const std::string* v = lookup(key);
  const std::uint64_t out = v ? parse_number<std::uint64_t>(key, *v) : fallback;
  effective_[key] = std::to_string(out);
  return out;
}

std::vector<long> Config::get_int_list(const std::string& key, const std::vector<long>& fallback) {
  const std::string* v = lookup(key);
  std::vector<long> out;
  if (v) {
    for (const auto& item : split_list(*v)) out.push_back(parse_number<long>(key, item));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  } else {
    out = fallback;
  }
  std::string echo;
  for (size_t i = 0; i < out.size(); ++i) echo += (i ? "," : "") + std::to_string(out[i]);
  effective_[key] = echo;
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& fallback) {
  const std::string* v = lookup(key);
  std::vector<double> out;
  if (v) {
    for (const auto& item : split_list(*v)) out.push_back(parse_number<double>(key, item));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  } else {
    out = fallback;
  }
  std::string echo;
  for (size_t i = 0; i < out.size(); ++i) echo += (i ? "," : "") + format_double(out[i]);
  effective_[key] = echo;
  return out;
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : raw_) {
    if (!effective_.count(k)) out.push_back(k);
  }
  return out;
}

}  // namespace eatool
