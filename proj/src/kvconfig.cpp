#include "gphase/kvconfig.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gphase/su2core.hpp"

namespace gphase {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("expected a number, got an empty value");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError("not a finite number: \"" + t + "\"");
  }
  return v;
}

double parse_angle(const std::string& text) {
  std::string t = trim(text);
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    std::string coef = trim(t.substr(0, t.size() - 2));
    if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
    if (coef.empty() || coef == "+") return kPi;
    if (coef == "-") return -kPi;
    return parse_real(coef) * kPi;
  }
  return parse_real(t);
}

std::vector<double> parse_list(const std::string& text, bool angles) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(angles ? parse_angle(item) : parse_real(item));
  if (out.empty()) throw ConfigError("expected a comma separated list, got \"" + text + "\"");
  return out;
}

KvConfig KvConfig::parse(std::istream& in, const std::string& source) {
  std::vector<std::pair<int, std::string>> plain, replay;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.rfind("#@", 0) == 0) {
      replay.emplace_back(lineno, t.substr(2));
    } else if (!t.empty() && t[0] != '#') {
      plain.emplace_back(lineno, t);
    }
  }
  KvConfig cfg;
  for (const auto& [n, text] : replay.empty() ? plain : replay) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(n) + ": expected \"key = value\"");
    }
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(n) + ": empty key");
    cfg.values_[key] = trim(text.substr(eq + 1));
  }
  return cfg;
}

KvConfig KvConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse(in, path);
}

std::string KvConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key " + key);
  return it->second;
}

namespace {

template <class F>
auto with_key(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace

double KvConfig::get_double(const std::string& key) const {
  return with_key(key, [&] { return parse_real(get(key)); });
}

double KvConfig::get_angle(const std::string& key) const {
  return with_key(key, [&] { return parse_angle(get(key)); });
}

long KvConfig::get_int(const std::string& key) const {
  return with_key(key, [&] {
    const std::string t = trim(get(key));
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
      throw ConfigError("not an integer: \"" + t + "\"");
    }
    return v;
  });
}

bool KvConfig::get_bool(const std::string& key) const {
  return with_key(key, [&] {
    const std::string t = trim(get(key));
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("not a boolean: \"" + t + "\"");
  });
}

std::vector<double> KvConfig::get_list(const std::string& key, bool angles) const {
  return with_key(key, [&] { return parse_list(get(key), angles); });
}

}  // namespace gphase
