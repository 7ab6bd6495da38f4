#pragma once

#include <map>
#include <set>
#include <string>

namespace navfuse {

// Flat `key = value` configuration with '#' comments. Every key must be
// consumed by a typed getter; leftovers are reported as errors so typos in
// experiment configs fail loudly instead of silently using defaults.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;

  double get_double(const std::string& key, double fallback);
  int get_int(const std::string& key, int fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::string get_string(const std::string& key, const std::string& fallback);

  // Throws ConfigError naming every key that no getter asked for.
  void ensure_all_consumed() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

}  // namespace navfuse
