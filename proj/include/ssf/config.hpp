#pragma once

#include <map>
#include <optional>
#include <string>

namespace ssf::config {

/// Plain `[section]` / `key = value` text file; '#' and ';' start comments.
class ConfigFile {
 public:
  static ConfigFile load(const std::string& path);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::optional<double> get_double(const std::string& section, const std::string& key) const;
  std::optional<long> get_long(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace ssf::config
