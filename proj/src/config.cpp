#include "morseb/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "morseb/errors.hpp"

namespace morseb {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error("config line " + std::to_string(lineno) + " has an empty key");
    cfg.values_[key].push_back(value);
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw config_error("missing config key: " + key);
  return it->second.back();
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second.back();
}

const std::vector<std::string>& Config::get_all(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw config_error("missing config key: " + key);
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second.back(), &used);
    if (used != it->second.back().size()) throw config_error("");
    return v;
  } catch (...) {
    throw config_error("config key '" + key + "' is not a number: " + it->second.back());
  }
}

int Config::get_int(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second.back(), &used);
    if (used != it->second.back().size()) throw config_error("");
    return v;
  } catch (...) {
    throw config_error("config key '" + key + "' is not an integer: " + it->second.back());
  }
}

}  // namespace morseb
