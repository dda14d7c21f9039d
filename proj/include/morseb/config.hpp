#pragma once

#include <map>
#include <string>
#include <vector>

#include "morseb/errors.hpp"

namespace morseb {

/// Minimal key-value config format: one `key = value` per line, '#' starts a
/// comment, repeated keys accumulate in order.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  const std::vector<std::string>& get_all(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;

 private:
  std::map<std::string, std::vector<std::string>> values_;
};

}  // namespace morseb
