#pragma once

// Flat "key = value" configuration files.
//
//   # comment
//   theta_values = 0.25pi, 0.5pi, 1pi
//
// Files written by the CLI start with "#@ key = value" lines holding the
// resolved configuration. When a file contains any such line only those are
// read, so a CSV output can be fed back through --config to replay the run.

#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gphase {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KvConfig {
 public:
  static KvConfig parse(std::istream& in, const std::string& source = "<input>");
  static KvConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Throws ConfigError when the key is missing or the value does not parse.
  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  double get_angle(const std::string& key) const;
  long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key, bool angles = false) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Plain real number; throws ConfigError.
double parse_real(const std::string& text);
/// Real number optionally suffixed by "pi" ("0.5pi", "pi", "-2pi"); throws ConfigError.
double parse_angle(const std::string& text);
/// Comma separated reals or angles.
std::vector<double> parse_list(const std::string& text, bool angles);
std::string trim(const std::string& s);

}  // namespace gphase
