#include "bfi/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bfi/error.hpp"

namespace bfi {

namespace {

std::string trim(const std::string& s) {
  auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return b < e ? std::string(b, e) : std::string();
}

double parse_double(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw PreconditionError("config: '" + key + "' is not a number: '" + text + "'");
  return v;
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw PreconditionError("config: line " + std::to_string(lineno) + " is not 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw PreconditionError("config: empty key on line " + std::to_string(lineno));
    c.values_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("config: cannot open '" + path + "'");
  return parse(in);
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Config::require_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) throw PreconditionError("config: missing key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

std::size_t Config::count(const std::string& key, std::size_t fallback) const {
  if (!has(key)) return fallback;
  double v = number(key, 0.0);
  if (!(v >= 0.0) || v != std::floor(v)) throw PreconditionError("config: '" + key + "' must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get(key, "");
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw PreconditionError("config: '" + key + "' must be a boolean");
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  std::string s = get(key, "");
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(key, tok));
  return out;
}

Params Config::section(const std::string& prefix) const {
  Params out;
  const std::string p = prefix + ".";
  for (const auto& [k, v] : values_)
    if (k.rfind(p, 0) == 0) out[k.substr(p.size())] = v;
  return out;
}

PotentialPtr config_potential(const Config& config) {
  return get_potential(config.require_string("potential"), config.section("potential"));
}

std::vector<double> config_temperatures(const Config& config) {
  std::vector<double> ts = config.numbers("temperatures");
  if (ts.empty() && config.has("temperature")) ts.push_back(config.number("temperature", 0.0));
  require(!ts.empty(), "config: no temperatures given");
  for (double t : ts) require(std::isfinite(t) && t > 0.0, "config: temperatures must be > 0");
  return ts;
}

}  // namespace bfi
