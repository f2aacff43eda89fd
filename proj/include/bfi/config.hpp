#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bfi/potentials.hpp"

namespace bfi {

/// Flat `key = value` configuration. `#` starts a comment; keys use dotted
/// section prefixes (`potential.alpha`, `lsi.iters`, ...). Later keys
/// override earlier ones.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config parse_string(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  /// Comma- or whitespace-separated list of numbers.
  std::vector<double> numbers(const std::string& key) const;
  /// Entries under `prefix.` with the prefix stripped.
  Params section(const std::string& prefix) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Potential named by `potential`, with parameters from `potential.*`.
PotentialPtr config_potential(const Config& config);

/// Temperature ladder from `temperatures` (or a single `temperature`).
std::vector<double> config_temperatures(const Config& config);

}  // namespace bfi
