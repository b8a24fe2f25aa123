#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sqreg/errors.hpp"

namespace sqreg::config {

// Minimal INI reader: [section] headers, key = value lines, # or ; comments,
// blank lines ignored. Values keep their raw text; typed getters convert on
// demand and report the file:line on failure. Reads are tracked so callers
// can reject misspelled keys via check_all_consumed().
class Ini {
 public:
  static Ini parse_file(const std::string& path);  // IoError / ParseError
  static Ini parse_string(const std::string& text, const std::string& origin);

  // Section names in first-appearance order.
  const std::vector<std::string>& section_names() const { return order_; }
  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  long get_long(const std::string& section, const std::string& key) const;
  long get_long(const std::string& section, const std::string& key, long fallback) const;
  unsigned long long get_u64(const std::string& section, const std::string& key,
                             unsigned long long fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;

  // Throws ConfigError naming the first key never read by any getter.
  void check_all_consumed() const;

 private:
  struct Entry {
    std::string value;
    long line = 0;
  };
  std::string origin_;
  std::vector<std::string> order_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  mutable std::set<std::pair<std::string, std::string>> consumed_;

  const Entry* find(const std::string& section, const std::string& key) const;
  const Entry& require(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail_value(const std::string& section, const std::string& key,
                               const Entry& e, const std::string& want) const;
};

}  // namespace sqreg::config
